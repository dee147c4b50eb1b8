//! Protocol specifications, their Hamiltonians and full runs.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::lu::{apply_lu, LocalUnitary};
use crate::engine::spectrum::{low_spectrum, MAX_LEVELS_FOR_GROUND_SPACE};
use crate::engine::state::MAX_STATE_SITES;
use crate::engine::{evolve, expectation, uniform_times, EvolveOptions, HamiltonianProvider, StateVector};
use crate::error::{Error, Result};
use crate::pauli::PauliSum;
use crate::schedules::{lambda_f_opt, Boundary, Couplings, IsingOperators, ModelSchedules, Sweep};

/// Levels closer than this to the ground energy are treated as one ground space.
pub const GROUND_SPACE_GAP: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolKind {
    Adiabatic,
    Linear,
    Lcd,
    Lcdlu,
}

impl ProtocolKind {
    pub fn name(self) -> &'static str {
        match self {
            ProtocolKind::Adiabatic => "adiabatic",
            ProtocolKind::Linear => "linear",
            ProtocolKind::Lcd => "lcd",
            ProtocolKind::Lcdlu => "lcdlu",
        }
    }

    pub fn is_driven(self) -> bool {
        matches!(self, ProtocolKind::Lcd | ProtocolKind::Lcdlu)
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProtocolKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "adiabatic" => Ok(ProtocolKind::Adiabatic),
            "linear" => Ok(ProtocolKind::Linear),
            "lcd" => Ok(ProtocolKind::Lcd),
            "lcdlu" => Ok(ProtocolKind::Lcdlu),
            other => Err(Error::Usage(format!("unknown protocol kind {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolSpec {
    #[serde(rename = "L")]
    pub sites: usize,
    pub h_zi: f64,
    pub h_xf: f64,
    pub j_f: f64,
    pub tau: f64,
    pub boundary: Boundary,
    pub kind: ProtocolKind,
    pub lambda_f: f64,
    pub lu: Option<LocalUnitary>,
    /// Uniform sample times in `[0, τ]`, endpoints included.
    pub sample_count: usize,
    /// Integrator tolerance.
    pub tol: f64,
    /// Also compute the fidelity to the instantaneous ground state (one eigensolve per sample).
    pub track_instantaneous: bool,
}

impl Default for ProtocolSpec {
    fn default() -> Self {
        ProtocolSpec {
            sites: 4,
            h_zi: 1.0,
            h_xf: 2.0,
            j_f: 1.0,
            tau: 1.0,
            boundary: Boundary::Auto,
            kind: ProtocolKind::Lcd,
            lambda_f: 1.0,
            lu: None,
            sample_count: 201,
            tol: 1e-10,
            track_instantaneous: false,
        }
    }
}

impl ProtocolSpec {
    pub fn new(sites: usize, h_xf: f64, kind: ProtocolKind) -> Self {
        ProtocolSpec {
            sites,
            h_xf,
            kind,
            lu: (kind == ProtocolKind::Lcdlu).then(LocalUnitary::fixed_x_pi4),
            ..Default::default()
        }
    }

    pub fn with_lambda_f(mut self, lambda_f: f64) -> Self {
        self.lambda_f = lambda_f;
        self
    }

    pub fn with_kind(mut self, kind: ProtocolKind) -> Self {
        if kind == ProtocolKind::Lcdlu && self.lu.is_none() {
            self.lu = Some(LocalUnitary::fixed_x_pi4());
        }
        self.kind = kind;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.sites < 2 || self.sites > MAX_STATE_SITES {
            return bad(format!("L = {} outside [2, {MAX_STATE_SITES}]", self.sites));
        }
        for (name, v) in [("h_zi", self.h_zi), ("h_xf", self.h_xf), ("J_f", self.j_f), ("lambda_f", self.lambda_f)] {
            if !v.is_finite() {
                return bad(format!("{name} is not finite"));
            }
        }
        if self.h_zi == 0.0 {
            return bad("h_zi must be non-zero so the initial ground state is unique".into());
        }
        if self.h_xf < 0.0 {
            return bad(format!("h_xf = {} must be non-negative", self.h_xf));
        }
        if !(self.tau > 0.0) || !self.tau.is_finite() {
            return bad(format!("tau = {} must be positive", self.tau));
        }
        if self.sample_count < 2 {
            return bad("sample_count must be at least 2".into());
        }
        if !(self.tol > 0.0) {
            return bad("integrator tolerance must be positive".into());
        }
        match (&self.kind, &self.lu) {
            (ProtocolKind::Lcdlu, None) => return bad("kind lcdlu requires a local unitary".into()),
            (_, Some(lu)) => lu.validate(self.sites).map_err(|e| Error::Config(e.to_string()))?,
            _ => {}
        }
        Ok(())
    }

    pub fn model(&self) -> ModelSchedules {
        ModelSchedules::new(self.h_zi, self.h_xf, self.j_f)
    }

    pub fn sweep(&self) -> Result<Sweep> {
        Sweep::new(self.tau)
    }

    pub fn operators(&self) -> Result<IsingOperators> {
        IsingOperators::new(self.sites, self.boundary)
    }

    /// `1/(4ν)` for this model.
    pub fn theory_lambda_f(&self) -> Result<f64> {
        lambda_f_opt(&self.model())
    }

    pub fn times(&self) -> Vec<f64> {
        uniform_times(0.0, self.tau, self.sample_count)
    }

    /// `H₀(τ) = h_xf Σσˣ + J_f Σσᶻσᶻ`, the Hamiltonian whose ground state is prepared.
    pub fn target_hamiltonian(&self) -> Result<PauliSum> {
        Ok(self.operators()?.hamiltonian(&self.model().couplings(1.0)))
    }

    /// The all-ones (or all-zeros) ground state of `h_zi Σσᶻ`.
    pub fn initial_state(&self) -> Result<StateVector> {
        let dim = 1usize << self.sites;
        StateVector::basis(self.sites, if self.h_zi > 0.0 { dim - 1 } else { 0 })
    }
}

/// Time-dependent Hamiltonian of a protocol, with operators built once.
pub struct ProtocolHamiltonian {
    kind: ProtocolKind,
    lambda_f: f64,
    model: ModelSchedules,
    sweep: Sweep,
    ops: IsingOperators,
}

impl ProtocolHamiltonian {
    pub fn new(spec: &ProtocolSpec) -> Result<Self> {
        Ok(ProtocolHamiltonian {
            kind: spec.kind,
            lambda_f: spec.lambda_f,
            model: spec.model(),
            sweep: spec.sweep()?,
            ops: spec.operators()?,
        })
    }

    pub fn operators(&self) -> &IsingOperators {
        &self.ops
    }

    /// Couplings of the undriven part at time `t`.
    pub fn couplings(&self, t: f64) -> Result<Couplings> {
        match self.kind {
            ProtocolKind::Linear => {
                let tau = self.sweep.tau();
                if t < -1e-12 * tau || t > tau * (1.0 + 1e-12) {
                    return Err(Error::Range {
                        value: t,
                        min: 0.0,
                        max: tau,
                    });
                }
                let s = (t / tau).clamp(0.0, 1.0);
                Ok(Couplings {
                    h_z: (1.0 - s) * self.model.h_zi,
                    h_x: s * self.model.h_xf,
                    j: s * self.model.j_f,
                })
            }
            _ => Ok(self.model.couplings(self.sweep.point(t)?.lambda)),
        }
    }

    /// Coefficient `λ_f λ̇ α` of `Σσʸ` at time `t` (zero for undriven kinds).
    pub fn cd_amplitude(&self, t: f64) -> Result<f64> {
        if !self.kind.is_driven() {
            return Ok(0.0);
        }
        let p = self.sweep.point(t)?;
        if p.rate == 0.0 || self.lambda_f == 0.0 {
            return Ok(0.0);
        }
        Ok(self.lambda_f * p.rate * self.model.alpha(p.lambda)?)
    }

    /// Undriven Hamiltonian `H₀(t)` (or the linear ramp), whose ground state is tracked.
    pub fn reference_at(&self, t: f64) -> Result<PauliSum> {
        Ok(self.ops.hamiltonian(&self.couplings(t)?))
    }
}

impl HamiltonianProvider for ProtocolHamiltonian {
    fn len(&self) -> usize {
        self.ops.len()
    }

    fn hamiltonian_at(&self, t: f64) -> Result<PauliSum> {
        let mut h = self.reference_at(t)?;
        let a = self.cd_amplitude(t)?;
        if a != 0.0 {
            h.add_scaled(&self.ops.sum_y, a)?;
        }
        Ok(h)
    }
}

/// `H(t)` of `spec` as a Pauli sum.
pub fn build_hamiltonian(spec: &ProtocolSpec, t: f64) -> Result<PauliSum> {
    spec.validate()?;
    ProtocolHamiltonian::new(spec)?.hamiltonian_at(t)
}

/// Ground space of a Hamiltonian, used as a fidelity reference.
#[derive(Clone, Debug)]
pub struct GroundSpace {
    pub energy: f64,
    pub states: Vec<StateVector>,
}

impl GroundSpace {
    pub fn of(h: &PauliSum) -> Result<Self> {
        let dim = 1usize << h.len();
        let spec = low_spectrum(h, dim.min(MAX_LEVELS_FOR_GROUND_SPACE))?;
        let n = spec.levels_within(GROUND_SPACE_GAP);
        Ok(GroundSpace {
            energy: spec.energies[0],
            states: spec.states.into_iter().take(n).collect(),
        })
    }

    pub fn degeneracy(&self) -> usize {
        self.states.len()
    }

    /// Projection weight `Σ_g |⟨g|ψ⟩|²`; the ordinary fidelity when non-degenerate.
    pub fn fidelity(&self, psi: &StateVector) -> Result<f64> {
        let mut w = 0.0;
        for g in &self.states {
            w += g.inner(psi)?.norm_sqr();
        }
        Ok(w.clamp(0.0, 1.0))
    }
}

/// Target ground space of a spec, computed once and shared across repeated runs.
#[derive(Clone, Debug)]
pub struct Target {
    pub hamiltonian: PauliSum,
    pub ground: GroundSpace,
}

impl Target {
    pub fn of(spec: &ProtocolSpec) -> Result<Self> {
        let hamiltonian = spec.target_hamiltonian()?;
        let ground = GroundSpace::of(&hamiltonian)?;
        Ok(Target { hamiltonian, ground })
    }

    pub fn fidelity(&self, psi: &StateVector) -> Result<f64> {
        self.ground.fidelity(psi)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunResult {
    pub spec: ProtocolSpec,
    pub lambda_f: f64,
    pub times: Vec<f64>,
    /// Fidelity to the instantaneous ground state of the undriven Hamiltonian.
    pub instantaneous_fidelity: Option<Vec<f64>>,
    /// Fidelity to the target ground state along the sweep (before any LU).
    pub target_fidelity: Vec<f64>,
    /// `|‖ψ(t)‖ − 1|` per sample, before renormalization.
    pub norm_drift: Vec<f64>,
    /// `⟨H₀(λ(t))⟩` per sample (drive term excluded).
    pub energy: Vec<f64>,
    pub pre_lu_fidelity: f64,
    pub final_fidelity: f64,
    /// `⟨H₀(τ)⟩` of the final (post-LU) state.
    pub final_energy: f64,
    pub ground_energy: f64,
    pub energy_ratio: f64,
    pub target_degeneracy: usize,
    pub max_norm_drift: f64,
    #[serde(skip)]
    pub final_state: StateVector,
    #[serde(skip)]
    pub pre_lu_state: StateVector,
}

impl RunResult {
    /// Index of the largest target fidelity along the sweep.
    pub fn peak_index(&self) -> usize {
        self.target_fidelity
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(0)
    }
}

/// Compact summary for result files.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunRecord {
    pub spec: ProtocolSpec,
    pub lambda_f: f64,
    #[serde(rename = "F_final")]
    pub f_final: f64,
    #[serde(rename = "F_pre_lu")]
    pub f_pre_lu: f64,
    #[serde(rename = "E")]
    pub energy: f64,
    #[serde(rename = "E_ground")]
    pub ground_energy: f64,
    #[serde(rename = "E_ratio")]
    pub energy_ratio: f64,
    pub target_degeneracy: usize,
    pub trajectory_csv_path: Option<String>,
}

impl RunResult {
    pub fn record(&self, trajectory_csv_path: Option<String>) -> RunRecord {
        RunRecord {
            spec: self.spec.clone(),
            lambda_f: self.lambda_f,
            f_final: self.final_fidelity,
            f_pre_lu: self.pre_lu_fidelity,
            energy: self.final_energy,
            ground_energy: self.ground_energy,
            energy_ratio: self.energy_ratio,
            target_degeneracy: self.target_degeneracy,
            trajectory_csv_path,
        }
    }
}

pub fn run(spec: &ProtocolSpec) -> Result<RunResult> {
    spec.validate()?;
    let target = Target::of(spec)?;
    run_with_target(spec, &target)
}

/// Final state of the sweep before any LU (no intermediate samples kept).
pub fn final_state(spec: &ProtocolSpec) -> Result<StateVector> {
    spec.validate()?;
    let h = ProtocolHamiltonian::new(spec)?;
    let opts = EvolveOptions {
        tol: spec.tol,
        ..Default::default()
    };
    let traj = evolve(&h, &spec.initial_state()?, 0.0, spec.tau, &[spec.tau], &opts)?;
    Ok(traj.final_state().clone())
}

pub fn run_with_target(spec: &ProtocolSpec, target: &Target) -> Result<RunResult> {
    spec.validate()?;
    let h = ProtocolHamiltonian::new(spec)?;
    let times = spec.times();
    let opts = EvolveOptions {
        tol: spec.tol,
        ..Default::default()
    };
    let traj = evolve(&h, &spec.initial_state()?, 0.0, spec.tau, &times, &opts)?;

    let target_fidelity = traj
        .states
        .iter()
        .map(|s| target.fidelity(s))
        .collect::<Result<Vec<_>>>()?;
    let energy = traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(&t, s)| expectation(&h.reference_at(t)?, s))
        .collect::<Result<Vec<_>>>()?;
    let instantaneous_fidelity = if spec.track_instantaneous {
        let v = traj
            .times
            .iter()
            .zip(&traj.states)
            .map(|(&t, s)| GroundSpace::of(&h.reference_at(t)?)?.fidelity(s))
            .collect::<Result<Vec<_>>>()?;
        Some(v)
    } else {
        None
    };

    let pre_lu_state = traj.final_state().clone();
    let pre_lu_fidelity = *target_fidelity.last().expect("at least two samples");
    let final_state = match (&spec.kind, &spec.lu) {
        (ProtocolKind::Lcdlu, Some(lu)) => apply_lu(&pre_lu_state, lu)?,
        _ => pre_lu_state.clone(),
    };
    let final_fidelity = target.fidelity(&final_state)?;
    let final_energy = expectation(&target.hamiltonian, &final_state)?;
    let ground_energy = target.ground.energy;

    Ok(RunResult {
        spec: spec.clone(),
        lambda_f: spec.lambda_f,
        times: traj.times,
        instantaneous_fidelity,
        target_fidelity,
        norm_drift: traj.norm_drift,
        energy,
        pre_lu_fidelity,
        final_fidelity,
        final_energy,
        ground_energy,
        energy_ratio: final_energy / ground_energy,
        target_degeneracy: target.ground.degeneracy(),
        max_norm_drift: traj.max_norm_drift,
        final_state,
        pre_lu_state,
    })
}

/// `⟨ψ| ⊗ᵢ(−σˣᵢ) |ψ⟩`, the parity conserved by `H₀(τ)`.
pub fn symmetry_expectation(psi: &StateVector) -> f64 {
    let amps = psi.amplitudes();
    let mask = amps.len() - 1;
    let mut acc = num_complex::Complex64::new(0.0, 0.0);
    for (j, a) in amps.iter().enumerate() {
        acc += a.conj() * amps[j ^ mask];
    }
    let sign = if psi.len() % 2 == 0 { 1.0 } else { -1.0 };
    (sign * acc.re).clamp(-1.0, 1.0)
}
