//! Exponential-decay fits `F(L) ≈ 2^{a − cL}`.

use serde::{Deserialize, Serialize};

use crate::error::{usage, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// Decay rate `c` in `log₂ F = a − cL`.
    pub rate: f64,
    pub intercept: f64,
    /// Standard error of `c`; `None` with only two sizes.
    pub rate_stderr: Option<f64>,
    pub points: usize,
}

/// Ordinary least squares of `log₂ F` against `L`.
pub fn fit_decay(sizes: &[usize], fidelities: &[f64]) -> Result<DecayFit> {
    if sizes.len() != fidelities.len() {
        return usage("sizes and fidelities differ in length");
    }
    let mut distinct: Vec<usize> = sizes.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 2 {
        return usage("decay fit needs at least two distinct sizes");
    }
    if let Some(&f) = fidelities.iter().find(|&&f| !(f > 0.0) || !f.is_finite()) {
        return Err(Error::Range {
            value: f,
            min: f64::MIN_POSITIVE,
            max: 1.0,
        });
    }
    let n = sizes.len() as f64;
    let xs: Vec<f64> = sizes.iter().map(|&l| l as f64).collect();
    let ys: Vec<f64> = fidelities.iter().map(|f| f.log2()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rate_stderr = (sizes.len() > 2).then(|| {
        let ssr: f64 = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (y - intercept - slope * x).powi(2))
            .sum();
        (ssr / (n - 2.0) / sxx).sqrt()
    });
    Ok(DecayFit {
        rate: -slope,
        intercept,
        rate_stderr,
        points: sizes.len(),
    })
}
