//! Interpolated transverse-field Ising model and its first-order gauge amplitude.

use std::f64::consts::PI;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::quadrature::integrate;
use super::sweep::Sweep;
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString, PauliSum};

/// Absolute tolerance used for the oscillation-frequency integral.
pub const NU_TOLERANCE: f64 = 1e-10;

/// Boundary condition of the closing bond `σᶻ_L σᶻ_1`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Periodic,
    Antiperiodic,
    /// Periodic for even L, anti-periodic for odd L.
    #[default]
    Auto,
}

impl Boundary {
    /// Sign multiplying the closing bond for a chain of `len` sites.
    pub fn sign(self, len: usize) -> f64 {
        match self {
            Boundary::Periodic => 1.0,
            Boundary::Antiperiodic => -1.0,
            Boundary::Auto => {
                if len % 2 == 0 {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }
}

impl FromStr for Boundary {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "periodic" | "pbc" => Ok(Boundary::Periodic),
            "antiperiodic" | "anti-periodic" | "apbc" => Ok(Boundary::Antiperiodic),
            "auto" => Ok(Boundary::Auto),
            other => Err(Error::Config(format!("unknown boundary {other:?}"))),
        }
    }
}

/// Nearest-neighbour bonds `(i, j, sign)` of a ring of `len` sites.
///
/// Two sites share a single bond; the closing bond of longer rings carries the
/// boundary sign.
pub fn bonds(len: usize, boundary: Boundary) -> Vec<(usize, usize, f64)> {
    match len {
        0 | 1 => Vec::new(),
        2 => vec![(0, 1, 1.0)],
        _ => {
            let mut out: Vec<_> = (0..len - 1).map(|i| (i, i + 1, 1.0)).collect();
            out.push((len - 1, 0, boundary.sign(len)));
            out
        }
    }
}

/// Values of `(h_z, h_x, J)` or of their λ-derivatives.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Couplings {
    pub h_z: f64,
    pub h_x: f64,
    pub j: f64,
}

/// Linear interpolation `h_z = h_zi(1-λ)`, `h_x = λ h_xf`, `J = λ J_f`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSchedules {
    pub h_zi: f64,
    pub h_xf: f64,
    pub j_f: f64,
}

impl Default for ModelSchedules {
    fn default() -> Self {
        ModelSchedules {
            h_zi: 1.0,
            h_xf: 1.0,
            j_f: 1.0,
        }
    }
}

impl ModelSchedules {
    pub fn new(h_zi: f64, h_xf: f64, j_f: f64) -> Self {
        ModelSchedules { h_zi, h_xf, j_f }
    }

    pub fn couplings(&self, lambda: f64) -> Couplings {
        Couplings {
            h_z: self.h_zi * (1.0 - lambda),
            h_x: lambda * self.h_xf,
            j: lambda * self.j_f,
        }
    }

    pub fn derivatives(&self, _lambda: f64) -> Couplings {
        Couplings {
            h_z: -self.h_zi,
            h_x: self.h_xf,
            j: self.j_f,
        }
    }

    /// First-order gauge amplitude along this interpolation.
    pub fn alpha(&self, lambda: f64) -> Result<f64> {
        alpha_from_couplings(&self.couplings(lambda), &self.derivatives(lambda))
    }
}

/// Least-action amplitude of `Σσʸ`: `½(h_x' h_z − h_z' h_x)/(h_z² + h_x² + 2J²)`.
pub fn alpha_from_couplings(c: &Couplings, d: &Couplings) -> Result<f64> {
    let den = c.h_z * c.h_z + c.h_x * c.h_x + 2.0 * c.j * c.j;
    if den == 0.0 {
        return Err(Error::Singularity(
            "all couplings vanish; gauge amplitude undefined".into(),
        ));
    }
    Ok(0.5 * (-d.h_z * c.h_x + d.h_x * c.h_z) / den)
}

pub fn alpha_first_order(lambda: f64, model: &ModelSchedules) -> Result<f64> {
    model.alpha(lambda)
}

/// Frequency of the final-fidelity oscillation in `λ_f`, `(1/π)∫₀¹ α(λ) dλ`.
pub fn nu_lambda_f(model: &ModelSchedules) -> Result<f64> {
    model.alpha(0.5)?;
    integrate(
        |l| model.alpha(l).unwrap_or(f64::NAN),
        0.0,
        1.0,
        NU_TOLERANCE,
    )
    .map(|v| v / PI)
}

/// Same quantity integrated in time, `(1/π)∫₀^τ λ̇ α dt`.
pub fn nu_lambda_f_time(model: &ModelSchedules, sweep: &Sweep) -> Result<f64> {
    model.alpha(0.5)?;
    let integrand = |t: f64| match sweep.point(t) {
        Ok(p) => p.rate * model.alpha(p.lambda).unwrap_or(f64::NAN),
        Err(_) => f64::NAN,
    };
    integrate(integrand, 0.0, sweep.tau(), NU_TOLERANCE).map(|v| v / PI)
}

/// `1/(4ν)`.
pub fn lambda_f_opt(model: &ModelSchedules) -> Result<f64> {
    let nu = nu_lambda_f(model)?;
    if nu.abs() < 1e-300 {
        return Err(Error::NoDrive);
    }
    Ok(1.0 / (4.0 * nu))
}

/// `∫₀^{λ} α dλ'`, the accumulated counterdiabatic angle per unit `2λ_f`.
pub fn alpha_integral(model: &ModelSchedules, lambda: f64) -> Result<f64> {
    model.alpha(0.5)?;
    integrate(
        |l| model.alpha(l).unwrap_or(f64::NAN),
        0.0,
        lambda,
        NU_TOLERANCE,
    )
}

/// Uniform field sums and bond sums of an L-site ring, reused by every builder.
#[derive(Clone, Debug)]
pub struct IsingOperators {
    len: usize,
    boundary: Boundary,
    pub sum_x: PauliSum,
    pub sum_y: PauliSum,
    pub sum_z: PauliSum,
    /// `Σ s_b σᶻ_i σᶻ_j` with boundary sign `s_b`.
    pub sum_zz: PauliSum,
}

impl IsingOperators {
    pub fn new(len: usize, boundary: Boundary) -> Result<Self> {
        Ok(IsingOperators {
            len,
            boundary,
            sum_x: field_sum(len, Pauli::X)?,
            sum_y: field_sum(len, Pauli::Y)?,
            sum_z: field_sum(len, Pauli::Z)?,
            sum_zz: bond_sum(len, boundary, Pauli::Z, Pauli::Z, false)?,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn bonds(&self) -> Vec<(usize, usize, f64)> {
        bonds(self.len, self.boundary)
    }

    /// `h_z Σσᶻ + h_x Σσˣ + J Σσᶻσᶻ`.
    pub fn hamiltonian(&self, c: &Couplings) -> PauliSum {
        let mut h = self.sum_z.scaled(c.h_z);
        h.add_scaled(&self.sum_x, c.h_x).expect("same size");
        h.add_scaled(&self.sum_zz, c.j).expect("same size");
        h
    }

    /// Two-body sum `Σ s_b a_i b_j` over the bonds `(i, j, s_b)`.
    pub fn directed_bond_sum(&self, a: Pauli, b: Pauli) -> Result<PauliSum> {
        bond_sum(self.len, self.boundary, a, b, false)
    }

    /// Symmetrized two-body sum `Σ s_b (a_i b_j + b_i a_j)`.
    pub fn symmetric_bond_sum(&self, a: Pauli, b: Pauli) -> Result<PauliSum> {
        bond_sum(self.len, self.boundary, a, b, true)
    }
}

pub fn field_sum(len: usize, p: Pauli) -> Result<PauliSum> {
    let mut out = PauliSum::zero(len)?;
    for i in 0..len {
        out.add_term(PauliString::from_sites(len, &[(i, p)])?, 1.0)?;
    }
    Ok(out)
}

fn bond_sum(len: usize, boundary: Boundary, a: Pauli, b: Pauli, symmetric: bool) -> Result<PauliSum> {
    let mut out = PauliSum::zero(len)?;
    for (i, j, s) in bonds(len, boundary) {
        out.add_term(PauliString::from_sites(len, &[(i, a), (j, b)])?, s)?;
        if symmetric {
            out.add_term(PauliString::from_sites(len, &[(i, b), (j, a)])?, s)?;
        }
    }
    Ok(out)
}

/// One row of the exported driving schedule.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScheduleRow {
    pub t: f64,
    pub lambda: f64,
    pub dlambda_dt: f64,
    pub h_z: f64,
    pub h_x: f64,
    #[serde(rename = "J")]
    pub j: f64,
    pub alpha: f64,
    pub cd_amplitude: f64,
}

/// Samples the driving schedule at `n ≥ 2` uniform times.
pub fn schedule_table(
    model: &ModelSchedules,
    sweep: &Sweep,
    lambda_f: f64,
    n: usize,
) -> Result<Vec<ScheduleRow>> {
    if n < 2 {
        return Err(Error::Usage("schedule table needs at least two samples".into()));
    }
    (0..n)
        .map(|k| {
            let t = sweep.tau() * k as f64 / (n - 1) as f64;
            let p = sweep.point(t)?;
            let c = model.couplings(p.lambda);
            let alpha = model.alpha(p.lambda)?;
            Ok(ScheduleRow {
                t,
                lambda: p.lambda,
                dlambda_dt: p.rate,
                h_z: c.h_z,
                h_x: c.h_x,
                j: c.j,
                alpha,
                cd_amplitude: lambda_f * p.rate * alpha,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_closed_form_examples() {
        let m = ModelSchedules::new(1.0, 3.7, 1.0);
        assert!((m.alpha(0.0).unwrap() - 3.7 / 2.0).abs() < 1e-15);
        let m0 = ModelSchedules::new(1.0, 0.0, 1.0);
        for l in [0.0, 0.3, 1.0] {
            assert_eq!(m0.alpha(l).unwrap(), 0.0);
        }
        let m2 = ModelSchedules::new(1.0, 2.0, 1.0);
        assert!((m2.alpha(1.0).unwrap() - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn alpha_simplified_form_and_positivity() {
        for &h in &[0.2, 0.5, 1.0, 2.0, 10.0] {
            let m = ModelSchedules::new(1.0, h, 1.0);
            for k in 0..=50 {
                let l = k as f64 / 50.0;
                let simple = 0.5 * h / ((1.0 - l).powi(2) + l * l * (h * h + 2.0));
                let a = m.alpha(l).unwrap();
                assert!((a - simple).abs() < 1e-14);
                assert!(a > 0.0);
            }
        }
    }

    #[test]
    fn singular_couplings() {
        let c = Couplings::default();
        assert!(matches!(
            alpha_from_couplings(&c, &c),
            Err(Error::Singularity(_))
        ));
    }

    #[test]
    fn nu_zero_drive() {
        let m = ModelSchedules::new(1.0, 0.0, 1.0);
        assert_eq!(nu_lambda_f(&m).unwrap(), 0.0);
        assert!(matches!(lambda_f_opt(&m), Err(Error::NoDrive)));
    }

    #[test]
    fn nu_landau_zener_limit() {
        // J = 0: ∫α dλ is half the field rotation angle π/2, so ν = 1/4.
        let m = ModelSchedules::new(1.0, 2.0, 0.0);
        assert!((nu_lambda_f(&m).unwrap() - 0.25).abs() < 1e-10);
    }

    #[test]
    fn nu_parameterizations_agree() {
        for &h in &[0.5, 2.0, 8.0] {
            let m = ModelSchedules::new(1.0, h, 1.0);
            let a = nu_lambda_f(&m).unwrap();
            let b = nu_lambda_f_time(&m, &Sweep::new(1.0).unwrap()).unwrap();
            let c = nu_lambda_f_time(&m, &Sweep::new(2.5).unwrap()).unwrap();
            assert!((a - b).abs() < 1e-9 && (a - c).abs() < 1e-9, "{a} {b} {c}");
        }
    }

    #[test]
    fn optimal_lambda_f_grows_as_field_shrinks() {
        let mut prev = 0.0;
        for &h in &[10.0, 4.0, 2.0, 1.0, 0.5, 0.2] {
            let v = lambda_f_opt(&ModelSchedules::new(1.0, h, 1.0)).unwrap();
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn bond_layout() {
        assert_eq!(bonds(2, Boundary::Auto), vec![(0, 1, 1.0)]);
        assert_eq!(bonds(3, Boundary::Auto).last(), Some(&(2, 0, -1.0)));
        assert_eq!(bonds(4, Boundary::Auto).len(), 4);
        assert_eq!(bonds(5, Boundary::Periodic).last(), Some(&(4, 0, 1.0)));
    }

    #[test]
    fn schedule_export_endpoints() {
        let m = ModelSchedules::new(1.0, 2.0, 1.0);
        let rows = schedule_table(&m, &Sweep::new(1.0).unwrap(), 1.3, 11).unwrap();
        assert_eq!(rows.len(), 11);
        assert_eq!(rows[0].cd_amplitude, 0.0);
        assert_eq!(rows[0].h_z, 1.0);
        assert!((rows[10].h_x - 2.0).abs() < 1e-14);
    }
}
