//! Least-action solver for approximate adiabatic gauge potentials.
//!
//! For an ansatz `A = Σ β_k O_k` the operator `G = ∂_λH + i[A, H]` is affine in
//! `β`, so `S(β) = ⟨G, G⟩` is a positive-semidefinite quadratic. Writing
//! `C_k = i[O_k, H]`, its minimizer solves `M β = −b` with `M_kl = Re⟨C_k, C_l⟩`
//! and `b_k = Re⟨C_k, ∂_λH⟩`. Everything is carried out in the Pauli basis.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::model::IsingOperators;
use crate::error::{usage, Error, Result};
use crate::pauli::{commutator, hs_inner, Pauli, PauliSum};

/// Relative singular-value cutoff for rank decisions.
pub const RANK_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct VariationalSolution {
    pub coefficients: Vec<f64>,
    /// Minimized action `2^{-L} tr(G²)`.
    pub action: f64,
    /// Numerical rank of `M`; below the basis size the minimum-norm minimizer is returned.
    pub rank: usize,
    pub gram: DMatrix<f64>,
}

fn self_adjoint(op: &PauliSum, what: &str) -> Result<()> {
    if !op.is_self_adjoint(1e-12) {
        return usage(format!("{what} is not self-adjoint"));
    }
    Ok(())
}

fn numerical_rank(m: &DMatrix<f64>) -> usize {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_TOLERANCE * max).count()
}

/// `G = ∂_λH + i[Σ β_k O_k, H]`.
pub fn gauge_residual(
    h: &PauliSum,
    dh: &PauliSum,
    basis: &[PauliSum],
    coefficients: &[f64],
) -> Result<PauliSum> {
    if basis.len() != coefficients.len() {
        return usage("coefficient count differs from basis size");
    }
    let mut a = PauliSum::zero(h.len())?;
    for (o, &b) in basis.iter().zip(coefficients) {
        a.add_scaled(o, b)?;
    }
    let mut g = dh.clone();
    g.add_scaled(&commutator(&a, h)?, Complex64::new(0.0, 1.0))?;
    Ok(g)
}

pub fn solve_variational(
    h: &PauliSum,
    dh: &PauliSum,
    basis: &[PauliSum],
) -> Result<VariationalSolution> {
    self_adjoint(h, "Hamiltonian")?;
    self_adjoint(dh, "Hamiltonian derivative")?;
    if basis.is_empty() {
        return usage("empty ansatz basis");
    }
    for (k, o) in basis.iter().enumerate() {
        self_adjoint(o, &format!("basis operator {k}"))?;
        if o.len() != h.len() {
            return usage(format!("basis operator {k} has size {} not {}", o.len(), h.len()));
        }
    }
    let n = basis.len();
    let overlap = DMatrix::from_fn(n, n, |r, c| {
        hs_inner(&basis[r], &basis[c]).map(|z| z.re).unwrap_or(0.0)
    });
    let basis_rank = numerical_rank(&overlap);
    if basis_rank < n {
        return Err(Error::RankDeficient {
            rank: basis_rank,
            size: n,
        });
    }

    let i = Complex64::new(0.0, 1.0);
    let generated: Vec<PauliSum> = basis
        .iter()
        .map(|o| commutator(o, h).map(|c| c.scaled(i)))
        .collect::<Result<_>>()?;
    let mut gram = DMatrix::<f64>::zeros(n, n);
    let mut rhs = DVector::<f64>::zeros(n);
    for r in 0..n {
        for c in r..n {
            let v = hs_inner(&generated[r], &generated[c])?.re;
            gram[(r, c)] = v;
            gram[(c, r)] = v;
        }
        rhs[r] = -hs_inner(&generated[r], dh)?.re;
    }

    let svd = gram.clone().svd(true, true);
    let max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let rank = if max == 0.0 {
        0
    } else {
        svd.singular_values
            .iter()
            .filter(|&&s| s > RANK_TOLERANCE * max)
            .count()
    };
    let coefficients: Vec<f64> = if rank == 0 {
        vec![0.0; n]
    } else {
        svd.solve(&rhs, RANK_TOLERANCE * max)
            .map_err(|e| Error::Optimizer(e.to_string()))?
            .iter()
            .cloned()
            .collect()
    };
    let g = gauge_residual(h, dh, basis, &coefficients)?;
    let action = hs_inner(&g, &g)?.re;
    Ok(VariationalSolution {
        coefficients,
        action,
        rank,
        gram,
    })
}

/// A named operator basis together with its last solved coefficients.
#[derive(Clone, Debug)]
pub struct AgpAnsatz {
    pub labels: Vec<String>,
    pub basis: Vec<PauliSum>,
    pub coefficients: Vec<f64>,
}

impl AgpAnsatz {
    pub fn new(labels: Vec<String>, basis: Vec<PauliSum>) -> Result<Self> {
        if labels.len() != basis.len() {
            return usage("label count differs from basis size");
        }
        let n = basis.len();
        Ok(AgpAnsatz {
            labels,
            basis,
            coefficients: vec![0.0; n],
        })
    }

    /// `{Σσʸ}`.
    pub fn first_order(ops: &IsingOperators) -> Self {
        AgpAnsatz {
            labels: vec!["Y".into()],
            basis: vec![ops.sum_y.clone()],
            coefficients: vec![0.0],
        }
    }

    /// `{Σσʸ, Σ(σʸσᶻ + σᶻσʸ), Σ(σʸσˣ + σˣσʸ)}`.
    pub fn second_order(ops: &IsingOperators) -> Result<Self> {
        Ok(AgpAnsatz {
            labels: vec!["Y".into(), "YZ+ZY".into(), "YX+XY".into()],
            basis: vec![
                ops.sum_y.clone(),
                ops.symmetric_bond_sum(Pauli::Y, Pauli::Z)?,
                ops.symmetric_bond_sum(Pauli::Y, Pauli::X)?,
            ],
            coefficients: vec![0.0; 3],
        })
    }

    pub fn solve(&mut self, h: &PauliSum, dh: &PauliSum) -> Result<VariationalSolution> {
        let sol = solve_variational(h, dh, &self.basis)?;
        self.coefficients = sol.coefficients.clone();
        Ok(sol)
    }

    /// `Σ β_k O_k` with the current coefficients.
    pub fn operator(&self) -> Result<PauliSum> {
        let len = self.basis.first().map(|b| b.len()).unwrap_or(1);
        let mut a = PauliSum::zero(len)?;
        for (o, &b) in self.basis.iter().zip(&self.coefficients) {
            a.add_scaled(o, b)?;
        }
        Ok(a)
    }
}
