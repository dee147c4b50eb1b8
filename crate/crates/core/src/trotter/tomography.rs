//! Pauli-setting state tomography by linear inversion.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::circuit::Circuit;
use super::sampling::{draw, rotated_probabilities, Basis};
use crate::engine::{expectation, StateVector};
use crate::error::{usage, Error, Result};
use crate::pauli::{to_dense, Pauli, PauliString, PauliSum};

/// Largest register reconstructed (3^L settings, 4^L expectations).
pub const MAX_TOMOGRAPHY_SITES: usize = 4;

#[derive(Clone, Debug)]
pub struct TomographyResult {
    pub sites: usize,
    /// Physical density matrix after positivity repair.
    pub rho: DMatrix<Complex64>,
    /// Smallest eigenvalue of the raw linear-inversion estimate.
    pub raw_min_eigenvalue: f64,
    /// Estimated `⟨P⟩` for every Pauli string (identity included).
    pub expectations: BTreeMap<String, f64>,
    pub shots_per_setting: u64,
    pub seed: u64,
}

impl TomographyResult {
    /// `⟨ψ|ρ|ψ⟩`.
    pub fn fidelity(&self, psi: &StateVector) -> Result<f64> {
        if psi.len() != self.sites {
            return usage("state and reconstruction differ in size");
        }
        let v = psi.amplitudes();
        let mut acc = Complex64::new(0.0, 0.0);
        for r in 0..v.len() {
            for c in 0..v.len() {
                acc += v[r].conj() * self.rho[(r, c)] * v[c];
            }
        }
        Ok(acc.re.clamp(0.0, 1.0))
    }

    /// `max |ρ_rc − ψ_r ψ_c*|`.
    pub fn max_entry_error(&self, psi: &StateVector) -> f64 {
        let v = psi.amplitudes();
        let mut m: f64 = 0.0;
        for r in 0..v.len() {
            for c in 0..v.len() {
                m = m.max((self.rho[(r, c)] - v[r] * v[c].conj()).norm());
            }
        }
        m
    }

    pub fn trace(&self) -> f64 {
        self.rho.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.rho.clone())
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }
}

fn check_size(len: usize) -> Result<()> {
    if len > MAX_TOMOGRAPHY_SITES {
        return Err(Error::Capability(format!(
            "tomography limited to {MAX_TOMOGRAPHY_SITES} sites, got {len}"
        )));
    }
    Ok(())
}

fn settings(len: usize) -> Vec<Vec<Basis>> {
    let n = 3usize.pow(len as u32);
    (0..n)
        .map(|mut k| {
            let mut s = vec![Basis::Z; len];
            for site in (0..len).rev() {
                s[site] = [Basis::X, Basis::Y, Basis::Z][k % 3];
                k /= 3;
            }
            s
        })
        .collect()
}

fn pauli_of(b: Basis) -> Pauli {
    match b {
        Basis::X => Pauli::X,
        Basis::Y => Pauli::Y,
        Basis::Z => Pauli::Z,
    }
}

/// Every Pauli string with its expectation; strings are `I`/`X`/`Y`/`Z` words.
fn all_strings(len: usize) -> Vec<PauliString> {
    (0..4usize.pow(len as u32))
        .map(|mut k| {
            let mut ops = Vec::new();
            for site in (0..len).rev() {
                let p = Pauli::ALL[k % 4];
                if p != Pauli::I {
                    ops.push((site, p));
                }
                k /= 4;
            }
            PauliString::from_sites(len, &ops).expect("valid sites")
        })
        .collect()
}

fn reconstruct(len: usize, expectations: BTreeMap<String, f64>, shots: u64, seed: u64) -> Result<TomographyResult> {
    let mut op = PauliSum::zero(len)?.with_prune(0.0);
    let scale = 1.0 / (1usize << len) as f64;
    for (s, &v) in &expectations {
        op.add_term(s.parse()?, v * scale)?;
    }
    let raw = to_dense(&op)?;
    let herm = (&raw + raw.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(herm);
    let raw_min_eigenvalue = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let projected = project_to_simplex(eig.eigenvalues.as_slice());
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        projected.len(),
        projected.iter().map(|&x| Complex64::new(x, 0.0)),
    ));
    let v = &eig.eigenvectors;
    let rho = v * d * v.adjoint();
    Ok(TomographyResult {
        sites: len,
        rho,
        raw_min_eigenvalue,
        expectations,
        shots_per_setting: shots,
        seed,
    })
}

/// Euclidean projection of `values` onto `{p ≥ 0, Σp = 1}`.
pub fn project_to_simplex(values: &[f64]) -> Vec<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut shift = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        cum += u;
        let t = (cum - 1.0) / (k + 1) as f64;
        if u - t > 0.0 {
            shift = t;
        }
    }
    values.iter().map(|&v| (v - shift).max(0.0)).collect()
}

/// Shot-based tomography of the state prepared by `prep`.
///
/// Setting `k` draws from stream `k` of a generator seeded with `seed`, so
/// results do not depend on scheduling.
pub fn tomography(prep: &Circuit, shots_per_setting: u64, seed: u64) -> Result<TomographyResult> {
    check_size(prep.sites)?;
    tomography_of_state(&prep.prepare()?, shots_per_setting, seed)
}

pub fn tomography_of_state(psi: &StateVector, shots_per_setting: u64, seed: u64) -> Result<TomographyResult> {
    let len = psi.len();
    check_size(len)?;
    if shots_per_setting == 0 {
        return usage("at least one shot per setting is required");
    }
    let all = settings(len);
    let per_setting: Vec<Vec<(usize, f64)>> = all
        .par_iter()
        .enumerate()
        .map(|(k, setting)| {
            let probs = rotated_probabilities(psi, setting);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let counts = draw(&probs, shots_per_setting, &mut rng);
            // Subsets of measured sites: bit (L-1-i) of `m` selects site i.
            (0..1usize << len)
                .map(|m| {
                    let mut acc = 0.0;
                    for (&idx, &c) in &counts {
                        let sign = if (idx & m).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                        acc += sign * c as f64;
                    }
                    (m, acc / shots_per_setting as f64)
                })
                .collect()
        })
        .collect();

    let mut sums: BTreeMap<String, (f64, usize)> = BTreeMap::new();
    for (setting, values) in all.iter().zip(per_setting) {
        for (m, v) in values {
            let ops: Vec<(usize, Pauli)> = (0..len)
                .filter(|&i| m & (1 << (len - 1 - i)) != 0)
                .map(|i| (i, pauli_of(setting[i])))
                .collect();
            let key = PauliString::from_sites(len, &ops)?.to_string();
            let e = sums.entry(key).or_insert((0.0, 0));
            e.0 += v;
            e.1 += 1;
        }
    }
    let expectations = sums.into_iter().map(|(k, (s, n))| (k, s / n as f64)).collect();
    reconstruct(len, expectations, shots_per_setting, seed)
}

/// Infinite-shot limit: exact Pauli expectations of `psi`.
pub fn tomography_exact(psi: &StateVector) -> Result<TomographyResult> {
    let len = psi.len();
    check_size(len)?;
    let mut expectations = BTreeMap::new();
    for s in all_strings(len) {
        let v = expectation(&PauliSum::from_string(s, 1.0), psi)?;
        expectations.insert(s.to_string(), v);
    }
    reconstruct(len, expectations, 0, 0)
}
