//! Uniform Y-rotated frame in which the counterdiabatic term disappears.
//!
//! With `U_y(t) = ⊗ R_y(θ_y(t))` and `θ_y = 2λ_f ∫₀^{λ(t)} α dλ'`, the state
//! `ψ_rot = U_y† ψ` evolves under `U_y† H₀ U_y`: the `Σσʸ` term is exactly the
//! frame's own rotation rate and cancels.

use super::run::{ProtocolHamiltonian, ProtocolSpec};
use super::lu::{apply_lu, EulerTriple, LocalUnitary};
use crate::engine::{HamiltonianProvider, StateVector};
use crate::error::{usage, Result};
use crate::pauli::{Pauli, PauliSum};
use crate::schedules::{alpha_integral, IsingOperators, ModelSchedules, Sweep};

fn require_driven(spec: &ProtocolSpec) -> Result<()> {
    if !spec.kind.is_driven() {
        return usage(format!("rotating frame needs a driven protocol, not {}", spec.kind));
    }
    spec.validate()
}

/// `θ_y(t)`.
pub fn rotating_frame_theta(spec: &ProtocolSpec, t: f64) -> Result<f64> {
    require_driven(spec)?;
    theta(&spec.model(), &spec.sweep()?, spec.lambda_f, t)
}

fn theta(model: &ModelSchedules, sweep: &Sweep, lambda_f: f64, t: f64) -> Result<f64> {
    let lambda = sweep.point(t)?.lambda;
    if lambda == 0.0 || lambda_f == 0.0 {
        return Ok(0.0);
    }
    Ok(2.0 * lambda_f * alpha_integral(model, lambda)?)
}

/// Frame Hamiltonian built once per protocol.
pub struct RotatingFrame {
    inner: ProtocolHamiltonian,
    model: ModelSchedules,
    sweep: Sweep,
    lambda_f: f64,
    zx: PauliSum,
    xx: PauliSum,
}

impl RotatingFrame {
    pub fn new(spec: &ProtocolSpec) -> Result<Self> {
        require_driven(spec)?;
        let inner = ProtocolHamiltonian::new(spec)?;
        let ops: &IsingOperators = inner.operators();
        let zx = ops.symmetric_bond_sum(Pauli::Z, Pauli::X)?;
        let xx = ops.directed_bond_sum(Pauli::X, Pauli::X)?;
        Ok(RotatingFrame {
            inner,
            model: spec.model(),
            sweep: spec.sweep()?,
            lambda_f: spec.lambda_f,
            zx,
            xx,
        })
    }

    pub fn theta(&self, t: f64) -> Result<f64> {
        theta(&self.model, &self.sweep, self.lambda_f, t)
    }

    /// Maps a rotated-frame state back to the lab frame.
    pub fn to_lab(&self, psi_rot: &StateVector, t: f64) -> Result<StateVector> {
        apply_lu(psi_rot, &LocalUnitary::uniform(EulerTriple::y(self.theta(t)?)))
    }
}

impl HamiltonianProvider for RotatingFrame {
    fn len(&self) -> usize {
        self.inner.len()
    }

    fn hamiltonian_at(&self, t: f64) -> Result<PauliSum> {
        let c = self.inner.couplings(t)?;
        let (s, co) = self.theta(t)?.sin_cos();
        let ops = self.inner.operators();
        // R_y† Z R_y = cZ − sX and R_y† X R_y = cX + sZ.
        let mut h = ops.sum_z.scaled(c.h_z * co + c.h_x * s);
        h.add_scaled(&ops.sum_x, c.h_x * co - c.h_z * s)?;
        h.add_scaled(&ops.sum_zz, c.j * co * co)?;
        h.add_scaled(&self.zx, -c.j * co * s)?;
        h.add_scaled(&self.xx, c.j * s * s)?;
        Ok(h)
    }
}

/// `U_y†(t) H₀(t) U_y(t)`; contains no string with a `σʸ` factor.
pub fn rotating_frame_h(spec: &ProtocolSpec, t: f64) -> Result<PauliSum> {
    RotatingFrame::new(spec)?.hamiltonian_at(t)
}
