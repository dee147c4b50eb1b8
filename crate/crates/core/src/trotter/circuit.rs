//! Gate lists, first-order Trotter synthesis and exact circuit simulation.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::engine::gates::{apply_rzz, apply_single, rx, ry, rz};
use crate::engine::StateVector;
use crate::error::{usage, Result};
use crate::protocols::{LocalUnitary, ProtocolHamiltonian, ProtocolKind, ProtocolSpec};

/// Layers with smaller angles are dropped.
pub const ANGLE_PRUNE: f64 = 1e-15;

/// Rotation gates `R_P(θ) = exp(−iθP/2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate", rename_all = "lowercase")]
pub enum Gate {
    Rz { site: usize, angle: f64 },
    Rx { site: usize, angle: f64 },
    Ry { site: usize, angle: f64 },
    Rzz { a: usize, b: usize, angle: f64 },
}

impl Gate {
    pub fn angle(&self) -> f64 {
        match *self {
            Gate::Rz { angle, .. } | Gate::Rx { angle, .. } | Gate::Ry { angle, .. } | Gate::Rzz { angle, .. } => angle,
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self, Gate::Rzz { .. })
    }

    fn check(&self, len: usize) -> Result<()> {
        match *self {
            Gate::Rz { site, .. } | Gate::Rx { site, .. } | Gate::Ry { site, .. } => {
                if site >= len {
                    return usage(format!("gate site {site} outside a {len}-site register"));
                }
            }
            Gate::Rzz { a, b, .. } => {
                if a >= len || b >= len {
                    return usage(format!("gate sites ({a}, {b}) outside a {len}-site register"));
                }
                if a == b {
                    return usage(format!("two-qubit gate on a single site {a}"));
                }
            }
        }
        Ok(())
    }
}

/// Computational basis state the circuit starts from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitState {
    #[default]
    Zeros,
    Ones,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    #[serde(rename = "L")]
    pub sites: usize,
    pub init: InitState,
    /// Trotter steps the circuit was synthesized with.
    pub steps: usize,
    pub spec_hash: Option<String>,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(sites: usize) -> Self {
        Circuit {
            sites,
            init: InitState::Zeros,
            steps: 1,
            spec_hash: None,
            gates: Vec::new(),
        }
    }

    pub fn push(&mut self, g: Gate) -> Result<()> {
        g.check(self.sites)?;
        self.gates.push(g);
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.sites == 0 {
            return usage("circuit on zero sites");
        }
        if self.steps == 0 {
            return usage("circuit step count must be at least 1");
        }
        self.gates.iter().try_for_each(|g| g.check(self.sites))
    }

    pub fn single_qubit_count(&self) -> usize {
        self.gates.iter().filter(|g| !g.is_two_qubit()).count()
    }

    pub fn two_qubit_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_two_qubit()).count()
    }

    pub fn count(&self, pred: impl Fn(&Gate) -> bool) -> usize {
        self.gates.iter().filter(|g| pred(g)).count()
    }

    pub fn initial_state(&self) -> Result<StateVector> {
        let dim = 1usize << self.sites;
        StateVector::basis(
            self.sites,
            match self.init {
                InitState::Zeros => 0,
                InitState::Ones => dim - 1,
            },
        )
    }

    /// Simulates the circuit from its own initial state.
    pub fn prepare(&self) -> Result<StateVector> {
        simulate_circuit(self, &self.initial_state()?)
    }
}

/// Short stable digest of a spec and step count.
pub fn spec_hash(spec: &ProtocolSpec, steps: usize) -> String {
    let json = serde_json::to_string(spec).expect("spec serializes");
    let digest = Sha256::digest(format!("{json}|steps={steps}").as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

fn push_pruned(gates: &mut Vec<Gate>, g: Gate) {
    if g.angle().abs() >= ANGLE_PRUNE {
        gates.push(g);
    }
}

fn push_lu(gates: &mut Vec<Gate>, lu: &LocalUnitary, len: usize) -> Result<()> {
    for (site, t) in lu.triples(len)?.iter().enumerate() {
        push_pruned(gates, Gate::Rz { site, angle: t.beta });
        push_pruned(gates, Gate::Rx { site, angle: t.theta });
        push_pruned(gates, Gate::Rz { site, angle: t.alpha });
    }
    Ok(())
}

/// First-order Trotterization with midpoint coefficients.
///
/// Each step applies the RZ, RX, RY layers and then the RZZ layer; for
/// `lcdlu` the local unitary is appended after the last step.
pub fn synthesize(spec: &ProtocolSpec, steps: usize) -> Result<Circuit> {
    spec.validate()?;
    if steps == 0 {
        return usage("at least one Trotter step is required");
    }
    let h = ProtocolHamiltonian::new(spec)?;
    let len = spec.sites;
    let bonds = h.operators().bonds();
    let dt = spec.tau / steps as f64;
    let mut gates = Vec::with_capacity(steps * 4 * len);
    for k in 0..steps {
        let tm = (k as f64 + 0.5) * dt;
        let c = h.couplings(tm)?;
        let cd = h.cd_amplitude(tm)?;
        for site in 0..len {
            push_pruned(&mut gates, Gate::Rz { site, angle: 2.0 * c.h_z * dt });
        }
        for site in 0..len {
            push_pruned(&mut gates, Gate::Rx { site, angle: 2.0 * c.h_x * dt });
        }
        for site in 0..len {
            push_pruned(&mut gates, Gate::Ry { site, angle: 2.0 * cd * dt });
        }
        for &(a, b, s) in &bonds {
            push_pruned(&mut gates, Gate::Rzz { a, b, angle: 2.0 * s * c.j * dt });
        }
    }
    if spec.kind == ProtocolKind::Lcdlu {
        if let Some(lu) = &spec.lu {
            push_lu(&mut gates, lu, len)?;
        }
    }
    Ok(Circuit {
        sites: len,
        init: if spec.h_zi > 0.0 { InitState::Ones } else { InitState::Zeros },
        steps,
        spec_hash: Some(spec_hash(spec, steps)),
        gates,
    })
}

/// Applies the gates of `c` in order to `psi0`.
pub fn simulate_circuit(c: &Circuit, psi0: &StateVector) -> Result<StateVector> {
    if c.sites != psi0.len() {
        return usage(format!(
            "circuit on {} sites applied to a state on {}",
            c.sites,
            psi0.len()
        ));
    }
    c.validate()?;
    let len = c.sites;
    let mut amps = psi0.amplitudes().to_vec();
    for g in &c.gates {
        match *g {
            Gate::Rz { site, angle } => apply_single(&mut amps, len, site, &rz(angle)),
            Gate::Rx { site, angle } => apply_single(&mut amps, len, site, &rx(angle)),
            Gate::Ry { site, angle } => apply_single(&mut amps, len, site, &ry(angle)),
            Gate::Rzz { a, b, angle } => apply_rzz(&mut amps, len, a, b, angle),
        }
    }
    Ok(StateVector::from_raw(len, amps))
}
