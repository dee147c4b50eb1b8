//! Low-lying spectra of Pauli-sum Hamiltonians.
//!
//! Systems up to [`EigenConfig::dense_limit`] sites are diagonalized densely
//! (real symmetric kernel when the matrix is real). Larger systems use a
//! matrix-free Lanczos iteration with full reorthogonalization; a breakdown of
//! the Krylov recursion restarts from a fresh vector orthogonal to the current
//! basis so that degenerate levels are still resolved.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::state::{inner, norm, CompiledOperator, StateVector};
use crate::error::{usage, Error, Result};
use crate::pauli::{to_dense_with_limit, PauliSum, DEFAULT_DENSE_LIMIT};

/// Levels closer than this are flagged degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;
/// Levels requested when resolving a (possibly degenerate) ground space.
pub const MAX_LEVELS_FOR_GROUND_SPACE: usize = 4;
/// Required eigenpair residual `‖Hv − εv‖`.
pub const RESIDUAL_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug)]
pub struct EigenConfig {
    pub dense_limit: usize,
    pub max_krylov: usize,
    pub ritz_tol: f64,
    pub degeneracy_tol: f64,
    pub seed: u64,
}

impl Default for EigenConfig {
    fn default() -> Self {
        EigenConfig {
            dense_limit: DEFAULT_DENSE_LIMIT,
            max_krylov: 800,
            ritz_tol: 1e-11,
            degeneracy_tol: DEGENERACY_TOL,
            seed: 0x5eed,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SpectrumResult {
    /// Ascending.
    pub energies: Vec<f64>,
    pub states: Vec<StateVector>,
    pub residuals: Vec<f64>,
    degeneracy_tol: f64,
}

impl SpectrumResult {
    /// `ε_m − ε₀` for every returned level.
    pub fn gaps(&self) -> Vec<f64> {
        self.energies.iter().map(|e| e - self.energies[0]).collect()
    }

    /// `flags[m]` is true when level `m` is within tolerance of level `m + 1`.
    pub fn degenerate_with_next(&self) -> Vec<bool> {
        self.energies
            .windows(2)
            .map(|w| (w[1] - w[0]).abs() < self.degeneracy_tol)
            .collect()
    }

    /// Number of returned levels within tolerance of the ground energy.
    pub fn ground_degeneracy(&self) -> usize {
        self.levels_within(self.degeneracy_tol)
    }

    /// Count of levels with `ε − ε₀ < tol`.
    pub fn levels_within(&self, tol: f64) -> usize {
        self.energies
            .iter()
            .take_while(|&&e| e - self.energies[0] < tol)
            .count()
    }
}

#[derive(Clone, Debug)]
pub struct GroundState {
    pub energy: f64,
    pub state: StateVector,
    /// Size of the (numerically) degenerate ground space among computed levels.
    pub degeneracy: usize,
}

pub fn ground_state(h: &PauliSum) -> Result<GroundState> {
    ground_state_with(h, &EigenConfig::default())
}

pub fn ground_state_with(h: &PauliSum, cfg: &EigenConfig) -> Result<GroundState> {
    let dim = 1usize << h.len();
    let spec = low_spectrum_with(h, dim.min(3), cfg)?;
    let degeneracy = spec.ground_degeneracy();
    Ok(GroundState {
        energy: spec.energies[0],
        state: spec.states[0].clone(),
        degeneracy,
    })
}

pub fn low_spectrum(h: &PauliSum, k: usize) -> Result<SpectrumResult> {
    low_spectrum_with(h, k, &EigenConfig::default())
}

pub fn low_spectrum_with(h: &PauliSum, k: usize, cfg: &EigenConfig) -> Result<SpectrumResult> {
    if !h.is_self_adjoint(1e-12) {
        return usage("eigensolver requires a self-adjoint operator");
    }
    let dim = 1usize << h.len();
    if k == 0 || k > dim {
        return usage(format!("requested {k} levels from a {dim}-dimensional space"));
    }
    let (energies, vectors) = if h.len() <= cfg.dense_limit {
        dense_lowest(h, k, cfg.dense_limit)?
    } else {
        lanczos_lowest(h, k, cfg)?
    };
    let op = CompiledOperator::new(h);
    let mut states = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    for (e, v) in energies.iter().zip(vectors) {
        let hv = op.apply(&v);
        let r = hv
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b * *e).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if r > RESIDUAL_TOL * e.abs().max(1.0) {
            return Err(Error::Convergence {
                iterations: cfg.max_krylov,
                residual: r,
            });
        }
        residuals.push(r);
        states.push(StateVector::from_amplitudes(h.len(), v)?);
    }
    Ok(SpectrumResult {
        energies,
        states,
        residuals,
        degeneracy_tol: cfg.degeneracy_tol,
    })
}

fn real_matrix(h: &PauliSum) -> Option<DMatrix<f64>> {
    let dim = 1usize << h.len();
    let mut m = DMatrix::<f64>::zeros(dim, dim);
    for (s, c) in h.iter() {
        let coef = c * s.xz_phase();
        if coef.im.abs() > 1e-15 {
            return None;
        }
        let (x, z) = (s.x_mask() as usize, s.z_mask() as usize);
        for col in 0..dim {
            let sign = if (col & z).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            m[(col ^ x, col)] += coef.re * sign;
        }
    }
    Some(m)
}

fn sorted_indices(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    idx
}

fn dense_lowest(h: &PauliSum, k: usize, limit: usize) -> Result<(Vec<f64>, Vec<Vec<Complex64>>)> {
    if let Some(m) = real_matrix(h) {
        let eig = SymmetricEigen::new(m);
        let vals: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
        let order = sorted_indices(&vals);
        let energies = order.iter().take(k).map(|&i| vals[i]).collect();
        let vectors = order
            .iter()
            .take(k)
            .map(|&i| {
                eig.eigenvectors
                    .column(i)
                    .iter()
                    .map(|&x| Complex64::new(x, 0.0))
                    .collect()
            })
            .collect();
        return Ok((energies, vectors));
    }
    let m = to_dense_with_limit(h, limit)?;
    let eig = SymmetricEigen::new(m);
    let vals: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
    let order = sorted_indices(&vals);
    let energies = order.iter().take(k).map(|&i| vals[i]).collect();
    let vectors = order
        .iter()
        .take(k)
        .map(|&i| eig.eigenvectors.column(i).iter().cloned().collect())
        .collect();
    Ok((energies, vectors))
}

fn orthogonalize(w: &mut [Complex64], basis: &[Vec<Complex64>]) {
    // Two passes of classical Gram–Schmidt.
    for _ in 0..2 {
        for v in basis {
            let proj = inner(v, w);
            for (wi, vi) in w.iter_mut().zip(v) {
                *wi -= proj * vi;
            }
        }
    }
}

fn random_vector(dim: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    (0..dim)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

fn lanczos_lowest(h: &PauliSum, k: usize, cfg: &EigenConfig) -> Result<(Vec<f64>, Vec<Vec<Complex64>>)> {
    let op = CompiledOperator::new(h);
    let dim = 1usize << h.len();
    let max_m = cfg.max_krylov.min(dim);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let scale = h.iter().map(|(_, c)| c.norm()).sum::<f64>().max(1e-300);

    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();

    let mut v = random_vector(dim, &mut rng);
    let n = norm(&v);
    v.iter_mut().for_each(|a| *a /= n);
    let mut last_residual = f64::INFINITY;

    loop {
        let mut w = op.apply(&v);
        let a = inner(&v, &w).re;
        basis.push(v);
        alphas.push(a);
        orthogonalize(&mut w, &basis);
        let b = norm(&w);
        let m = basis.len();

        let breakdown = b < 1e-12 * scale;
        // A breakdown only exhausts one invariant subspace; degenerate partners
        // live in the complement, so keep going from a fresh vector.
        let check = m >= k && ((m % 10 == 0 && !breakdown) || m == max_m);
        if check {
            let t = tridiagonal(&alphas, &betas);
            let eig = SymmetricEigen::new(t);
            let vals: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
            let order = sorted_indices(&vals);
            let worst = order
                .iter()
                .take(k)
                .map(|&i| b * eig.eigenvectors[(m - 1, i)].abs())
                .fold(0.0, f64::max);
            last_residual = worst;
            let converged = worst <= cfg.ritz_tol * scale;
            if converged || m == max_m {
                if !converged && worst > RESIDUAL_TOL {
                    return Err(Error::Convergence {
                        iterations: m,
                        residual: worst,
                    });
                }
                let energies: Vec<f64> = order.iter().take(k).map(|&i| vals[i]).collect();
                let vectors = order
                    .iter()
                    .take(k)
                    .map(|&i| {
                        let mut y = vec![Complex64::new(0.0, 0.0); dim];
                        for (j, q) in basis.iter().enumerate() {
                            let s = eig.eigenvectors[(j, i)];
                            for (yi, qi) in y.iter_mut().zip(q) {
                                *yi += qi * s;
                            }
                        }
                        y
                    })
                    .collect();
                return Ok((energies, vectors));
            }
        }
        if m == max_m {
            return Err(Error::Convergence {
                iterations: m,
                residual: last_residual,
            });
        }

        if breakdown {
            let mut fresh = random_vector(dim, &mut rng);
            orthogonalize(&mut fresh, &basis);
            let n = norm(&fresh);
            fresh.iter_mut().for_each(|x| *x /= n);
            betas.push(0.0);
            v = fresh;
        } else {
            w.iter_mut().for_each(|x| *x /= b);
            betas.push(b);
            v = w;
        }
    }
}

fn tridiagonal(alphas: &[f64], betas: &[f64]) -> DMatrix<f64> {
    let m = alphas.len();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alphas[i];
        if i + 1 < m {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::state::{expectation, fidelity};
    use crate::schedules::{Boundary, Couplings, IsingOperators, ModelSchedules};

    #[test]
    fn diagonal_field() {
        let ops = IsingOperators::new(3, Boundary::Auto).unwrap();
        let g = ground_state(&ops.sum_z).unwrap();
        assert!((g.energy + 3.0).abs() < 1e-12);
        assert!((g.state.amplitudes()[7].norm() - 1.0).abs() < 1e-12);
        assert_eq!(g.degeneracy, 1);
    }

    #[test]
    fn transverse_field_product_state() {
        let ops = IsingOperators::new(2, Boundary::Auto).unwrap();
        let g = ground_state(&ops.sum_x).unwrap();
        assert!((g.energy + 2.0).abs() < 1e-12);
        let minus = StateVector::from_amplitudes(
            2,
            vec![1.0, -1.0, -1.0, 1.0].into_iter().map(|x| Complex64::new(x, 0.0)).collect(),
        )
        .unwrap();
        assert!((fidelity(&g.state, &minus).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_middle_level() {
        let ops = IsingOperators::new(2, Boundary::Auto).unwrap();
        let s = low_spectrum(&ops.sum_z, 3).unwrap();
        assert!((s.energies[0] + 2.0).abs() < 1e-12);
        assert!(s.energies[1].abs() < 1e-12 && s.energies[2].abs() < 1e-12);
        assert_eq!(s.degenerate_with_next(), vec![false, true]);
    }

    #[test]
    fn antiferromagnetic_target() {
        let ops = IsingOperators::new(4, Boundary::Auto).unwrap();
        let h = ops.hamiltonian(&ModelSchedules::new(1.0, 0.5, 1.0).couplings(1.0));
        let g = ground_state(&h).unwrap();
        let p = g.state.probabilities();
        assert!(p[0b1010] + p[0b0101] > 0.9);
        assert!((expectation(&h, &g.state).unwrap() - g.energy).abs() < 1e-9);
    }

    #[test]
    fn complex_hermitian_dense_path() {
        let ops = IsingOperators::new(3, Boundary::Auto).unwrap();
        let mut h = ops.hamiltonian(&Couplings { h_z: 0.3, h_x: 0.8, j: 1.0 });
        h.add_scaled(&ops.sum_y, 0.4).unwrap();
        let s = low_spectrum(&h, 2).unwrap();
        assert!(s.residuals.iter().all(|&r| r < 1e-10));
        assert!(s.energies[0] <= s.energies[1]);
    }

    #[test]
    fn lanczos_matches_dense() {
        let ops = IsingOperators::new(8, Boundary::Auto).unwrap();
        let h = ops.hamiltonian(&Couplings { h_z: 0.2, h_x: 0.9, j: 1.0 });
        let dense = low_spectrum(&h, 2).unwrap();
        let cfg = EigenConfig {
            dense_limit: 4,
            ..Default::default()
        };
        let lz = low_spectrum_with(&h, 2, &cfg).unwrap();
        for i in 0..2 {
            assert!((dense.energies[i] - lz.energies[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn lanczos_resolves_exact_degeneracy() {
        let ops = IsingOperators::new(6, Boundary::Auto).unwrap();
        let cfg = EigenConfig {
            dense_limit: 2,
            ..Default::default()
        };
        let s = low_spectrum_with(&ops.sum_z, 3, &cfg).unwrap();
        assert!((s.energies[0] + 6.0).abs() < 1e-9);
        assert!((s.energies[1] + 4.0).abs() < 1e-9);
        assert!((s.energies[2] + 4.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_requests() {
        let ops = IsingOperators::new(2, Boundary::Auto).unwrap();
        assert!(low_spectrum(&ops.sum_z, 5).is_err());
        assert!(low_spectrum(&ops.sum_z.scaled(Complex64::new(0.0, 1.0)), 1).is_err());
    }
}
