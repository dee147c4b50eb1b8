//! Exact algebra over L-site Pauli strings.
//!
//! A string is stored as an X mask and a Z mask. Site `i` occupies bit
//! `L - 1 - i`, the same position it has in a computational basis index, so
//! the leftmost letter of `"XZI"` acts on the most significant qubit and a
//! string can be applied to an amplitude index without any remapping.
//!
//! Per site the letter is `X^x Z^z` up to a phase, with `Y = i X Z`. A whole
//! string is therefore `i^{n_y} X^{x} Z^{z}` where `n_y = popcount(x & z)`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{usage, Error, Result};

/// Largest supported system size for bitmask strings.
pub const MAX_SITES: usize = 64;
/// Coefficients below this magnitude are dropped after every operation.
pub const DEFAULT_PRUNE: f64 = 1e-14;
/// Largest L for which [`to_dense`] builds a matrix.
pub const DEFAULT_DENSE_LIMIT: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// Power of `i`: the phase picked up when multiplying Pauli strings.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_power(k: u32) -> Self {
        Phase((k % 4) as u8)
    }

    pub fn power(self) -> u8 {
        self.0
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

/// An L-site tensor product of single-site Pauli operators, without coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    len: u8,
    x: u64,
    z: u64,
}

impl PauliString {
    pub fn identity(len: usize) -> Result<Self> {
        check_len(len)?;
        Ok(PauliString {
            len: len as u8,
            x: 0,
            z: 0,
        })
    }

    /// Builds a string from raw masks in index-bit layout (site `i` at bit `L-1-i`).
    pub fn from_masks(len: usize, x: u64, z: u64) -> Result<Self> {
        check_len(len)?;
        let full = full_mask(len);
        if x & !full != 0 || z & !full != 0 {
            return usage(format!("mask has bits beyond {len} sites"));
        }
        Ok(PauliString { len: len as u8, x, z })
    }

    /// String with the given letters at the given sites and identity elsewhere.
    pub fn from_sites(len: usize, ops: &[(usize, Pauli)]) -> Result<Self> {
        let mut s = Self::identity(len)?;
        for &(site, p) in ops {
            if site >= len {
                return usage(format!("site {site} out of range for L={len}"));
            }
            s.set(site, p);
        }
        Ok(s)
    }

    fn bit(&self, site: usize) -> u64 {
        1u64 << (self.len as usize - 1 - site)
    }

    fn set(&mut self, site: usize, p: Pauli) {
        let b = self.bit(site);
        let (x, z) = p.bits();
        self.x = if x { self.x | b } else { self.x & !b };
        self.z = if z { self.z | b } else { self.z & !b };
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn get(&self, site: usize) -> Pauli {
        let b = self.bit(site);
        Pauli::from_bits(self.x & b != 0, self.z & b != 0)
    }

    pub fn letters(&self) -> impl Iterator<Item = Pauli> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }

    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// Number of non-identity sites.
    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    /// `self · other = phase · result`.
    pub fn multiply(&self, other: &PauliString) -> Result<(Phase, PauliString)> {
        if self.len != other.len {
            return usage(format!(
                "cannot multiply strings of length {} and {}",
                self.len, other.len
            ));
        }
        Ok(self.multiply_unchecked(other))
    }

    fn multiply_unchecked(&self, other: &PauliString) -> (Phase, PauliString) {
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        // i^{a} X^x1 Z^z1 · i^{b} X^x2 Z^z2 and Z^z1 X^x2 = (-1)^{|z1&x2|} X^x2 Z^z1
        let swap = 2 * (self.z & other.x).count_ones();
        let k = self.y_count() + other.y_count() + swap + 4 * MAX_SITES as u32
            - (x & z).count_ones();
        (
            Phase::from_power(k),
            PauliString {
                len: self.len,
                x,
                z,
            },
        )
    }

    /// Phase factor `i^{n_y}` relating the string to `X^x Z^z`.
    pub(crate) fn xz_phase(&self) -> Complex64 {
        Phase::from_power(self.y_count()).to_complex()
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in self.letters() {
            write!(f, "{}", p.letter())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let len = s.chars().count();
        let mut out = PauliString::identity(len)?;
        for (i, c) in s.chars().enumerate() {
            let p = Pauli::from_letter(c)
                .ok_or_else(|| Error::Parse(format!("invalid Pauli letter {c:?} in {s:?}")))?;
            out.set(i, p);
        }
        Ok(out)
    }
}

fn check_len(len: usize) -> Result<()> {
    if len == 0 || len > MAX_SITES {
        return usage(format!("system size must be in 1..={MAX_SITES}, got {len}"));
    }
    Ok(())
}

fn full_mask(len: usize) -> u64 {
    if len == 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

/// `a · b = phase · c`.
pub fn multiply(a: &PauliString, b: &PauliString) -> Result<(Phase, PauliString)> {
    a.multiply(b)
}

/// Sparse complex-weighted sum of Pauli strings on a fixed number of sites.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    len: usize,
    terms: BTreeMap<PauliString, Complex64>,
    prune: f64,
}

impl PauliSum {
    pub fn zero(len: usize) -> Result<Self> {
        check_len(len)?;
        Ok(PauliSum {
            len,
            terms: BTreeMap::new(),
            prune: DEFAULT_PRUNE,
        })
    }

    pub fn with_prune(mut self, prune: f64) -> Self {
        self.prune = prune;
        self.prune_small();
        self
    }

    pub fn from_string(s: PauliString, coeff: impl Into<Complex64>) -> Self {
        let mut out = PauliSum {
            len: s.len(),
            terms: BTreeMap::new(),
            prune: DEFAULT_PRUNE,
        };
        out.insert(s, coeff.into());
        out
    }

    /// Parses `(letters, coefficient)` pairs.
    pub fn from_terms<'a, C: Into<Complex64>>(
        len: usize,
        terms: impl IntoIterator<Item = (&'a str, C)>,
    ) -> Result<Self> {
        let mut out = Self::zero(len)?;
        for (letters, c) in terms {
            let s: PauliString = letters.parse()?;
            out.add_term(s, c.into())?;
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn prune_threshold(&self) -> f64 {
        self.prune
    }

    /// Terms in canonical (mask) order.
    pub fn iter(&self) -> impl Iterator<Item = (&PauliString, &Complex64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, s: &PauliString) -> Complex64 {
        self.terms.get(s).copied().unwrap_or_default()
    }

    /// Coefficient of the string spelled by `letters`; zero if absent or malformed.
    pub fn coefficient_of(&self, letters: &str) -> Complex64 {
        letters
            .parse::<PauliString>()
            .map(|s| self.coefficient(&s))
            .unwrap_or_default()
    }

    fn insert(&mut self, s: PauliString, c: Complex64) {
        let entry = self.terms.entry(s).or_default();
        *entry += c;
        if entry.norm() < self.prune {
            self.terms.remove(&s);
        }
    }

    fn prune_small(&mut self) {
        let prune = self.prune;
        self.terms.retain(|_, c| c.norm() >= prune);
    }

    pub fn add_term(&mut self, s: PauliString, c: impl Into<Complex64>) -> Result<()> {
        if s.len() != self.len {
            return usage(format!(
                "term of length {} added to sum of size {}",
                s.len(),
                self.len
            ));
        }
        self.insert(s, c.into());
        Ok(())
    }

    fn check_same(&self, other: &PauliSum) -> Result<()> {
        if self.len != other.len {
            return usage(format!(
                "operator sizes differ: {} vs {}",
                self.len, other.len
            ));
        }
        Ok(())
    }

    /// `self += scale · other`.
    pub fn add_scaled(&mut self, other: &PauliSum, scale: impl Into<Complex64>) -> Result<()> {
        self.check_same(other)?;
        let scale = scale.into();
        for (s, c) in &other.terms {
            self.insert(*s, c * scale);
        }
        Ok(())
    }

    pub fn add(&self, other: &PauliSum) -> Result<PauliSum> {
        let mut out = self.clone();
        out.add_scaled(other, 1.0)?;
        Ok(out)
    }

    pub fn sub(&self, other: &PauliSum) -> Result<PauliSum> {
        let mut out = self.clone();
        out.add_scaled(other, -1.0)?;
        Ok(out)
    }

    pub fn scaled(&self, scale: impl Into<Complex64>) -> PauliSum {
        let scale = scale.into();
        let mut out = PauliSum {
            len: self.len,
            terms: BTreeMap::new(),
            prune: self.prune,
        };
        for (s, c) in &self.terms {
            out.insert(*s, c * scale);
        }
        out
    }

    /// Operator product `self · other`.
    pub fn mul(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_same(other)?;
        let mut out = PauliSum {
            len: self.len,
            terms: BTreeMap::new(),
            prune: self.prune.max(other.prune),
        };
        for (sa, ca) in &self.terms {
            for (sb, cb) in &other.terms {
                let (ph, s) = sa.multiply_unchecked(sb);
                *out.terms.entry(s).or_default() += ph.to_complex() * ca * cb;
            }
        }
        out.prune_small();
        Ok(out)
    }

    /// Hermitian conjugate; every Pauli string is self-adjoint, so only coefficients conjugate.
    pub fn adjoint(&self) -> PauliSum {
        PauliSum {
            len: self.len,
            terms: self.terms.iter().map(|(s, c)| (*s, c.conj())).collect(),
            prune: self.prune,
        }
    }

    /// True when every coefficient is real to within `tol`.
    pub fn is_self_adjoint(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.im.abs() <= tol)
    }

    /// Largest coefficient magnitude, zero for the empty sum.
    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// True when every string contains an odd number of Y letters, i.e. `i·O` is real
    /// in the computational basis for real coefficients.
    pub fn is_imaginary_compatible(&self) -> bool {
        self.terms.keys().all(|s| s.y_count() % 2 == 1)
    }
}

/// `[a, b] = ab - ba`. Only anticommuting string pairs contribute, each with `2·phase`.
pub fn commutator(a: &PauliSum, b: &PauliSum) -> Result<PauliSum> {
    a.check_same(b)?;
    let mut out = PauliSum {
        len: a.len,
        terms: BTreeMap::new(),
        prune: a.prune.max(b.prune),
    };
    for (sa, ca) in &a.terms {
        for (sb, cb) in &b.terms {
            if sa.commutes_with(sb) {
                continue;
            }
            let (ph, s) = sa.multiply_unchecked(sb);
            *out.terms.entry(s).or_default() += 2.0 * ph.to_complex() * ca * cb;
        }
    }
    out.prune_small();
    Ok(out)
}

/// Normalized Hilbert–Schmidt inner product `2^{-L} tr(a† b)`.
pub fn hs_inner(a: &PauliSum, b: &PauliSum) -> Result<Complex64> {
    a.check_same(b)?;
    let (small, large, flip) = if a.terms.len() <= b.terms.len() {
        (a, b, false)
    } else {
        (b, a, true)
    };
    let mut acc = Complex64::new(0.0, 0.0);
    for (s, c) in &small.terms {
        if let Some(d) = large.terms.get(s) {
            acc += if flip { d.conj() * c } else { c.conj() * d };
        }
    }
    Ok(acc)
}

/// Dense `2^L × 2^L` matrix in the computational basis with the default size limit.
pub fn to_dense(a: &PauliSum) -> Result<DMatrix<Complex64>> {
    to_dense_with_limit(a, DEFAULT_DENSE_LIMIT)
}

pub fn to_dense_with_limit(a: &PauliSum, limit: usize) -> Result<DMatrix<Complex64>> {
    if a.len > limit {
        return Err(Error::Capability(format!(
            "dense matrix requested for L={} above limit {limit}",
            a.len
        )));
    }
    let dim = 1usize << a.len;
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for (s, c) in &a.terms {
        let coef = c * s.xz_phase();
        let (x, z) = (s.x as usize, s.z as usize);
        for col in 0..dim {
            let sign = if (col & z).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            m[(col ^ x, col)] += coef * sign;
        }
    }
    Ok(m)
}

#[derive(Serialize, Deserialize)]
struct TermRecord {
    string: String,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct SumRecord {
    #[serde(rename = "L")]
    len: usize,
    terms: Vec<TermRecord>,
}

impl Serialize for PauliSum {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SumRecord {
            len: self.len,
            terms: self
                .terms
                .iter()
                .map(|(s, c)| TermRecord {
                    string: s.to_string(),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PauliSum {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let rec = SumRecord::deserialize(deserializer)?;
        let mut out = PauliSum::zero(rec.len).map_err(D::Error::custom)?;
        for t in rec.terms {
            let s: PauliString = t.string.parse().map_err(D::Error::custom)?;
            out.add_term(s, Complex64::new(t.re, t.im))
                .map_err(D::Error::custom)?;
        }
        Ok(out)
    }
}
