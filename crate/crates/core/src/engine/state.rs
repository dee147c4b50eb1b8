use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{usage, Error, Result};
use crate::pauli::{PauliSum, MAX_SITES};

/// Dimension above which operator application is split across threads.
pub const PARALLEL_DIM: usize = 1 << 12;
/// Largest system size a dense state vector is allocated for.
pub const MAX_STATE_SITES: usize = 26;

/// Normalized `2^L`-component state.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    len: usize,
    amps: Vec<Complex64>,
}

fn check_sites(len: usize) -> Result<()> {
    if len == 0 || len > MAX_STATE_SITES.min(MAX_SITES) {
        return Err(Error::Capability(format!(
            "state vectors support 1..={MAX_STATE_SITES} sites, got {len}"
        )));
    }
    Ok(())
}

impl StateVector {
    /// Computational basis state `|index⟩`; site 0 is the most significant bit.
    pub fn basis(len: usize, index: usize) -> Result<Self> {
        check_sites(len)?;
        let dim = 1usize << len;
        if index >= dim {
            return usage(format!("basis index {index} out of range for L={len}"));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { len, amps })
    }

    /// Basis state spelled as a bitstring such as `"1010"`.
    pub fn from_bitstring(bits: &str) -> Result<Self> {
        let len = bits.len();
        let index = usize::from_str_radix(bits, 2)
            .map_err(|_| Error::Parse(format!("invalid bitstring {bits:?}")))?;
        Self::basis(len, index)
    }

    /// Normalizes the given amplitudes.
    pub fn from_amplitudes(len: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_sites(len)?;
        if amps.len() != 1usize << len {
            return usage(format!(
                "expected {} amplitudes for L={len}, got {}",
                1usize << len,
                amps.len()
            ));
        }
        let mut s = StateVector { len, amps };
        let n = s.norm();
        if !(n.is_finite() && n > 0.0) {
            return usage("state has zero or non-finite norm");
        }
        s.scale(1.0 / n);
        Ok(s)
    }

    pub(crate) fn from_raw(len: usize, amps: Vec<Complex64>) -> Self {
        StateVector { len, amps }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amps)
    }

    pub(crate) fn scale(&mut self, s: f64) {
        for a in &mut self.amps {
            *a *= s;
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.len != other.len {
            return usage(format!("state sizes differ: {} vs {}", self.len, other.len));
        }
        Ok(inner(&self.amps, &other.amps))
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Bitstring label of basis index `index` on this system.
    pub fn bitstring(&self, index: usize) -> String {
        bitstring(index, self.len)
    }
}

pub fn bitstring(index: usize, len: usize) -> String {
    format!("{:0width$b}", index, width = len)
}

pub(crate) fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Pauli sum lowered to `(x_mask, [(z_mask, coefficient · i^{n_y})])` groups.
///
/// A group with X mask `x` maps index `j ⊕ x` to `j`, so application is a
/// gather with no write conflicts.
#[derive(Clone, Debug)]
pub struct CompiledOperator {
    len: usize,
    groups: Vec<(usize, Vec<(usize, Complex64)>)>,
}

impl CompiledOperator {
    pub fn new(op: &PauliSum) -> Self {
        let mut groups: Vec<(usize, Vec<(usize, Complex64)>)> = Vec::new();
        for (s, c) in op.iter() {
            let x = s.x_mask() as usize;
            let entry = (s.z_mask() as usize, c * s.xz_phase());
            match groups.iter_mut().find(|g| g.0 == x) {
                Some(g) => g.1.push(entry),
                None => groups.push((x, vec![entry])),
            }
        }
        CompiledOperator {
            len: op.len(),
            groups,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    #[inline]
    fn row(&self, j: usize, psi: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, terms) in &self.groups {
            let src = j ^ x;
            let mut coef = Complex64::new(0.0, 0.0);
            for &(z, c) in terms {
                if (src & z).count_ones() & 1 == 0 {
                    coef += c;
                } else {
                    coef -= c;
                }
            }
            acc += coef * psi[src];
        }
        acc
    }

    /// `out = H · psi`.
    pub fn apply_into(&self, psi: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(psi.len(), 1usize << self.len);
        debug_assert_eq!(out.len(), psi.len());
        if psi.len() >= PARALLEL_DIM {
            const CHUNK: usize = 1 << 10;
            out.par_chunks_mut(CHUNK).enumerate().for_each(|(ci, chunk)| {
                let base = ci * CHUNK;
                for (k, o) in chunk.iter_mut().enumerate() {
                    *o = self.row(base + k, psi);
                }
            });
        } else {
            for (j, o) in out.iter_mut().enumerate() {
                *o = self.row(j, psi);
            }
        }
    }

    pub fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
        self.apply_into(psi, &mut out);
        out
    }
}

/// `H ψ`, unnormalized.
pub fn apply(h: &PauliSum, psi: &StateVector) -> Result<Vec<Complex64>> {
    if h.len() != psi.len() {
        return usage(format!(
            "operator on {} sites applied to state on {}",
            h.len(),
            psi.len()
        ));
    }
    Ok(CompiledOperator::new(h).apply(psi.amplitudes()))
}

/// `|⟨ψ|φ⟩|²`.
pub fn fidelity(psi: &StateVector, phi: &StateVector) -> Result<f64> {
    Ok(psi.inner(phi)?.norm_sqr().clamp(0.0, 1.0))
}

/// `⟨ψ|H|ψ⟩` for self-adjoint `H`.
pub fn expectation(h: &PauliSum, psi: &StateVector) -> Result<f64> {
    if !h.is_self_adjoint(1e-12) {
        return usage("expectation of a non-self-adjoint operator");
    }
    let hpsi = apply(h, psi)?;
    let v = inner(psi.amplitudes(), &hpsi);
    debug_assert!(v.im.abs() <= 1e-10 * (1.0 + v.re.abs()));
    Ok(v.re)
}
