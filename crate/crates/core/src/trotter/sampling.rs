//! Seeded projective measurements and energy estimation from shot records.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::engine::gates::{apply_single, hadamard, matmul, s_dagger, Mat2};
use crate::engine::{bitstring, StateVector};
use crate::error::{usage, Error, Result};
use crate::schedules::{bonds, Boundary};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Basis {
    /// Rotation mapping the basis eigenstates onto `|0⟩, |1⟩`.
    pub(crate) fn rotation(self) -> Option<Mat2> {
        match self {
            Basis::Z => None,
            Basis::X => Some(hadamard()),
            Basis::Y => Some(matmul(&hadamard(), &s_dagger())),
        }
    }

    pub fn letter(self) -> char {
        match self {
            Basis::X => 'X',
            Basis::Y => 'Y',
            Basis::Z => 'Z',
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for Basis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "X" | "x" => Ok(Basis::X),
            "Y" | "y" => Ok(Basis::Y),
            "Z" | "z" => Ok(Basis::Z),
            other => Err(Error::Parse(format!("unknown measurement basis {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotRecord {
    pub basis: Basis,
    pub shots: u64,
    pub seed: u64,
    /// Bitstring (site 0 first) to occurrences.
    pub counts: BTreeMap<String, u64>,
}

impl ShotRecord {
    pub fn sites(&self) -> usize {
        self.counts.keys().next().map_or(0, |k| k.len())
    }

    pub fn validate(&self) -> Result<()> {
        let total: u64 = self.counts.values().sum();
        if total != self.shots {
            return usage(format!("counts sum to {total}, record claims {} shots", self.shots));
        }
        let len = self.sites();
        if self
            .counts
            .keys()
            .any(|k| k.len() != len || !k.bytes().all(|b| b == b'0' || b == b'1'))
        {
            return usage("bitstrings must be binary and of equal length");
        }
        Ok(())
    }

    pub fn frequency(&self, bits: &str) -> f64 {
        *self.counts.get(bits).unwrap_or(&0) as f64 / self.shots as f64
    }

    /// Most frequent bitstrings, ties broken lexicographically.
    pub fn top(&self, n: usize) -> Vec<(String, u64)> {
        let mut v: Vec<(String, u64)> = self.counts.iter().map(|(k, &c)| (k.clone(), c)).collect();
        v.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        v.truncate(n);
        v
    }
}

/// Each site measured in its own basis.
pub(crate) fn rotated_probabilities(psi: &StateVector, setting: &[Basis]) -> Vec<f64> {
    let len = psi.len();
    let mut amps = psi.amplitudes().to_vec();
    for (site, b) in setting.iter().enumerate() {
        if let Some(u) = b.rotation() {
            apply_single(&mut amps, len, site, &u);
        }
    }
    let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    amps.iter().map(|a| a.norm_sqr() / norm).collect()
}

/// Draws `shots` outcome indices from `probs`.
pub(crate) fn draw(probs: &[f64], shots: u64, rng: &mut ChaCha8Rng) -> BTreeMap<usize, u64> {
    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for p in probs {
        acc += p;
        cdf.push(acc);
    }
    let total = acc;
    let mut counts = BTreeMap::new();
    for _ in 0..shots {
        let u: f64 = rng.gen::<f64>() * total;
        let idx = cdf.partition_point(|&c| c <= u).min(probs.len() - 1);
        *counts.entry(idx).or_insert(0) += 1;
    }
    counts
}

/// Measures every site of `psi` in `basis`, `shots` times.
pub fn sample(psi: &StateVector, basis: Basis, shots: u64, seed: u64) -> Result<ShotRecord> {
    if shots == 0 {
        return usage("at least one shot is required");
    }
    let probs = rotated_probabilities(psi, &vec![basis; psi.len()]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let counts = draw(&probs, shots, &mut rng)
        .into_iter()
        .map(|(i, c)| (bitstring(i, psi.len()), c))
        .collect();
    Ok(ShotRecord {
        basis,
        shots,
        seed,
        counts,
    })
}

/// `+1` for a `0` bit, `−1` for a `1` bit.
fn spin(bits: &[u8], i: usize) -> f64 {
    if bits[i] == b'1' {
        -1.0
    } else {
        1.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyEstimate {
    pub energy: f64,
    pub stderr: f64,
    /// `J_f Σ⟨σᶻσᶻ⟩`.
    pub zz: f64,
    /// `h_xf Σ⟨σˣ⟩`.
    pub x: f64,
}

/// Mean and standard error of the mean of a per-shot quantity.
fn shot_mean(rec: &ShotRecord, f: impl Fn(&[u8]) -> f64) -> (f64, f64) {
    let n = rec.shots as f64;
    let mut s1 = 0.0;
    let mut s2 = 0.0;
    for (k, &c) in &rec.counts {
        let v = f(k.as_bytes());
        s1 += c as f64 * v;
        s2 += c as f64 * v * v;
    }
    let mean = s1 / n;
    if rec.shots < 2 {
        return (mean, 0.0);
    }
    let var = ((s2 - n * mean * mean) / (n - 1.0)).max(0.0);
    (mean, (var / n).sqrt())
}

fn bond_energy(len: usize, j_f: f64, boundary: Boundary) -> impl Fn(&[u8]) -> f64 {
    let bs = bonds(len, boundary);
    move |bits: &[u8]| {
        j_f * bs
            .iter()
            .map(|&(a, b, s)| s * spin(bits, a) * spin(bits, b))
            .sum::<f64>()
    }
}

fn field_energy(h_xf: f64) -> impl Fn(&[u8]) -> f64 {
    move |bits: &[u8]| h_xf * (0..bits.len()).map(|i| spin(bits, i)).sum::<f64>()
}

/// `⟨H₀(τ)⟩ = J_f Σ⟨σᶻσᶻ⟩ + h_xf Σ⟨σˣ⟩` from Z- and X-basis records.
///
/// The standard error uses the per-shot sample variance of each basis's total
/// energy, so correlations between bonds (or between sites) are included.
pub fn estimate_energy(
    rec_z: &ShotRecord,
    rec_x: &ShotRecord,
    h_xf: f64,
    j_f: f64,
    boundary: Boundary,
) -> Result<EnergyEstimate> {
    if rec_z.basis != Basis::Z || rec_x.basis != Basis::X {
        return usage(format!(
            "expected Z and X records, got {} and {}",
            rec_z.basis, rec_x.basis
        ));
    }
    rec_z.validate()?;
    rec_x.validate()?;
    let len = rec_z.sites();
    if rec_x.sites() != len {
        return usage("records cover different numbers of sites");
    }
    let (zz, se_z) = shot_mean(rec_z, bond_energy(len, j_f, boundary));
    let (x, se_x) = shot_mean(rec_x, field_energy(h_xf));
    Ok(EnergyEstimate {
        energy: zz + x,
        stderr: (se_z * se_z + se_x * se_x).sqrt(),
        zz,
        x,
    })
}

/// Infinite-shot limit of [`estimate_energy`]: averages over the exact outcome distributions.
pub fn exact_energy(psi: &StateVector, h_xf: f64, j_f: f64, boundary: Boundary) -> EnergyEstimate {
    let len = psi.len();
    let average = |basis: Basis, f: &dyn Fn(&[u8]) -> f64| -> f64 {
        rotated_probabilities(psi, &vec![basis; len])
            .iter()
            .enumerate()
            .map(|(i, p)| p * f(bitstring(i, len).as_bytes()))
            .sum()
    };
    let zz = average(Basis::Z, &bond_energy(len, j_f, boundary));
    let x = average(Basis::X, &field_energy(h_xf));
    EnergyEstimate {
        energy: zz + x,
        stderr: 0.0,
        zz,
        x,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn record(basis: Basis, bits: &str, shots: u64) -> ShotRecord {
        ShotRecord {
            basis,
            shots,
            seed: 0,
            counts: [(bits.to_string(), shots)].into_iter().collect(),
        }
    }

    #[test]
    fn basis_state_is_deterministic() {
        let psi = StateVector::from_bitstring("1010").unwrap();
        let r = sample(&psi, Basis::Z, 1000, 3).unwrap();
        assert_eq!(r.counts.len(), 1);
        assert_eq!(r.counts["1010"], 1000);
    }

    #[test]
    fn minus_states_in_x_basis() {
        let amps = [1.0, -1.0, -1.0, 1.0].iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let psi = StateVector::from_amplitudes(2, amps).unwrap();
        let r = sample(&psi, Basis::X, 500, 1).unwrap();
        assert_eq!(r.counts["11"], 500);
    }

    #[test]
    fn y_eigenstate() {
        // (|0⟩ + i|1⟩)/√2 is the +1 eigenstate of σʸ.
        let psi = StateVector::from_amplitudes(1, vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)]).unwrap();
        let r = sample(&psi, Basis::Y, 200, 1).unwrap();
        assert_eq!(r.counts["0"], 200);
    }

    #[test]
    fn cat_state_frequencies() {
        let mut amps = vec![Complex64::new(0.0, 0.0); 16];
        amps[0b1010] = Complex64::new(1.0, 0.0);
        amps[0b0101] = Complex64::new(1.0, 0.0);
        let psi = StateVector::from_amplitudes(4, amps).unwrap();
        let r = sample(&psi, Basis::Z, 100_000, 7).unwrap();
        assert!((r.frequency("1010") - 0.5).abs() < 0.01);
        assert!((r.frequency("0101") - 0.5).abs() < 0.01);
        assert_eq!(r, sample(&psi, Basis::Z, 100_000, 7).unwrap());
    }

    #[test]
    fn energy_examples() {
        let z = record(Basis::Z, "1010", 100);
        let x = record(Basis::X, "1111", 100);
        let e = estimate_energy(&z, &x, 0.0, 1.0, Boundary::Periodic).unwrap();
        assert_eq!(e.zz, -4.0);
        assert_eq!(e.stderr, 0.0);
        let z2 = record(Basis::Z, "00", 10);
        let x2 = record(Basis::X, "11", 10);
        let e = estimate_energy(&z2, &x2, 1.0, 0.0, Boundary::Auto).unwrap();
        assert_eq!(e.x, -2.0);
        assert!(estimate_energy(&x2, &z2, 1.0, 1.0, Boundary::Auto).is_err());
    }

    #[test]
    fn json_shape() {
        let r = record(Basis::Z, "1010", 1000);
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["basis"], "Z");
        assert_eq!(v["counts"]["1010"], 1000);
    }

    #[test]
    fn inconsistent_record_rejected() {
        let mut r = record(Basis::Z, "10", 5);
        r.shots = 6;
        assert!(r.validate().is_err());
    }
}
