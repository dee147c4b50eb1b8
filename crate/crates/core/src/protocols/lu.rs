//! Single-site unitaries applied after the counterdiabatic sweep.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use crate::engine::gates::{apply_single, matmul, rx, rz, Mat2};
use crate::engine::StateVector;
use crate::error::{usage, Result};

/// Maps an angle into `(−2π, 2π]`; rotations are 4π-periodic.
pub fn wrap_angle(x: f64) -> f64 {
    let y = x.rem_euclid(4.0 * PI);
    if y > 2.0 * PI {
        y - 4.0 * PI
    } else {
        y
    }
}

/// `R_z(α) R_x(θ) R_z(β)` with `β` applied first.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EulerTriple {
    pub alpha: f64,
    pub theta: f64,
    pub beta: f64,
}

impl EulerTriple {
    pub fn new(alpha: f64, theta: f64, beta: f64) -> Self {
        EulerTriple {
            alpha: wrap_angle(alpha),
            theta: wrap_angle(theta),
            beta: wrap_angle(beta),
        }
    }

    pub fn x(theta: f64) -> Self {
        Self::new(0.0, theta, 0.0)
    }

    /// `R_y(θ) = R_z(π/2) R_x(θ) R_z(−π/2)`.
    pub fn y(theta: f64) -> Self {
        Self::new(FRAC_PI_2, theta, -FRAC_PI_2)
    }

    pub fn z(alpha: f64) -> Self {
        Self::new(alpha, 0.0, 0.0)
    }

    pub fn matrix(&self) -> Mat2 {
        matmul(&matmul(&rz(self.alpha), &rx(self.theta)), &rz(self.beta))
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.alpha, self.theta, self.beta]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum LocalUnitary {
    /// Uniform `R_x(θ)` on every site.
    XRotation { theta: f64 },
    Uniform { triple: EulerTriple },
    PerSite { triples: Vec<EulerTriple> },
}

impl LocalUnitary {
    /// Uniform `R_x(π/4)`.
    pub fn fixed_x_pi4() -> Self {
        LocalUnitary::XRotation { theta: FRAC_PI_4 }
    }

    pub fn x_rotation(theta: f64) -> Self {
        LocalUnitary::XRotation {
            theta: wrap_angle(theta),
        }
    }

    pub fn uniform(triple: EulerTriple) -> Self {
        LocalUnitary::Uniform { triple }
    }

    pub fn per_site(triples: Vec<EulerTriple>) -> Self {
        LocalUnitary::PerSite { triples }
    }

    /// Triple acting on each of `len` sites.
    pub fn triples(&self, len: usize) -> Result<Vec<EulerTriple>> {
        match self {
            LocalUnitary::XRotation { theta } => Ok(vec![EulerTriple::x(*theta); len]),
            LocalUnitary::Uniform { triple } => Ok(vec![*triple; len]),
            LocalUnitary::PerSite { triples } => {
                if triples.len() != len {
                    return usage(format!(
                        "per-site unitary has {} triples for {len} sites",
                        triples.len()
                    ));
                }
                Ok(triples.clone())
            }
        }
    }

    pub fn validate(&self, len: usize) -> Result<()> {
        self.triples(len).map(|_| ())
    }
}

impl Default for LocalUnitary {
    fn default() -> Self {
        Self::fixed_x_pi4()
    }
}

/// `⊗ᵢ R_z(αᵢ) R_x(θᵢ) R_z(βᵢ) |ψ⟩`.
pub fn apply_lu(psi: &StateVector, lu: &LocalUnitary) -> Result<StateVector> {
    let len = psi.len();
    let triples = lu.triples(len)?;
    let mut amps = psi.amplitudes().to_vec();
    for (site, t) in triples.iter().enumerate() {
        let m = t.matrix();
        apply_single(&mut amps, len, site, &m);
    }
    Ok(StateVector::from_raw(len, amps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::fidelity;
    use crate::engine::gates::ry;

    fn random_state(len: usize) -> StateVector {
        let amps = (0..1usize << len)
            .map(|i| num_complex::Complex64::new((i as f64 * 0.7).sin(), (i as f64 * 1.3 + 0.2).cos()))
            .collect();
        StateVector::from_amplitudes(len, amps).unwrap()
    }

    #[test]
    fn wrapping() {
        assert_eq!(wrap_angle(0.0), 0.0);
        assert!((wrap_angle(2.0 * PI) - 2.0 * PI).abs() < 1e-15);
        assert!((wrap_angle(3.0 * PI) + PI).abs() < 1e-12);
        assert!((wrap_angle(-2.0 * PI) - 2.0 * PI).abs() < 1e-12);
        assert!((wrap_angle(-0.5) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn zero_angles_are_identity() {
        let psi = random_state(3);
        let out = apply_lu(&psi, &LocalUnitary::uniform(EulerTriple::new(0.0, 0.0, 0.0))).unwrap();
        assert_eq!(out.amplitudes(), psi.amplitudes());
    }

    #[test]
    fn full_turn_is_global_phase() {
        let psi = random_state(3);
        let out = apply_lu(&psi, &LocalUnitary::x_rotation(2.0 * PI)).unwrap();
        assert!((fidelity(&psi, &out).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn y_triple_matches_ry() {
        let m = EulerTriple::y(0.81).matrix();
        let want = ry(0.81);
        for r in 0..2 {
            for c in 0..2 {
                assert!((m[r][c] - want[r][c]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn preserves_norm() {
        let psi = random_state(4);
        let triples = (0..4).map(|i| EulerTriple::new(0.3 * i as f64, 1.1, -0.4)).collect();
        let out = apply_lu(&psi, &LocalUnitary::per_site(triples)).unwrap();
        assert!((out.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn per_site_count_checked() {
        let psi = random_state(3);
        let lu = LocalUnitary::per_site(vec![EulerTriple::x(0.1); 2]);
        assert!(apply_lu(&psi, &lu).is_err());
    }

    #[test]
    fn serde_shape() {
        let v = serde_json::to_value(LocalUnitary::fixed_x_pi4()).unwrap();
        assert_eq!(v["mode"], "x_rotation");
        let back: LocalUnitary = serde_json::from_value(v).unwrap();
        assert_eq!(back, LocalUnitary::fixed_x_pi4());
    }
}
