//! Final fidelity against system size and exponential fits per protocol.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::lu::{apply_lu, LocalUnitary};
use super::run::{final_state, ProtocolKind, ProtocolSpec, Target};
use super::tuning::{optimize_lambda_f, optimize_lu_for_state, LuMode};
use crate::error::{usage, Result};
use crate::optimize::{fit_decay, DecayFit};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "protocol", rename_all = "snake_case")]
pub enum ScalingProtocol {
    Adiabatic,
    Linear,
    Lcd,
    /// LCD followed by a fixed unitary.
    LcdluFixed { lu: LocalUnitary },
    /// LCD followed by the optimized unitary in the given mode.
    LcdluOptimal { mode: LuMode },
}

impl ScalingProtocol {
    pub fn label(&self) -> String {
        match self {
            ScalingProtocol::Adiabatic => "adiabatic".into(),
            ScalingProtocol::Linear => "linear".into(),
            ScalingProtocol::Lcd => "lcd".into(),
            ScalingProtocol::LcdluFixed { .. } => "lcdlu_fixed".into(),
            ScalingProtocol::LcdluOptimal { mode } => {
                let m = serde_json::to_value(mode).ok().and_then(|v| v.as_str().map(String::from));
                format!("lcdlu_opt_{}", m.unwrap_or_default())
            }
        }
    }
}

/// How `λ_f` is chosen at each size.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum LambdaFPolicy {
    /// `1/(4ν)`.
    Theory,
    /// Optimize at every size up to `max_size`; larger sizes reuse the value
    /// found at the largest optimized size.
    Brent { max_size: usize },
    Fixed { value: f64 },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScalingRow {
    #[serde(rename = "L")]
    pub sites: usize,
    pub protocol: String,
    pub lambda_f: f64,
    pub fidelity: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScalingFit {
    pub protocol: String,
    pub fit: DecayFit,
    /// `log₂F − (a − cL)` per size, in input order.
    pub residuals: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScalingReport {
    pub rows: Vec<ScalingRow>,
    pub fits: Vec<ScalingFit>,
    /// Sizes that failed, with the error message.
    pub failures: Vec<(usize, String)>,
    pub partial: bool,
}

impl ScalingReport {
    pub fn fit(&self, label: &str) -> Option<&DecayFit> {
        self.fits.iter().find(|f| f.protocol == label).map(|f| &f.fit)
    }

    pub fn fidelity(&self, label: &str, sites: usize) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.protocol == label && r.sites == sites)
            .map(|r| r.fidelity)
    }
}

fn lambda_for(template: &ProtocolSpec, sites: usize, policy: LambdaFPolicy) -> Result<f64> {
    let spec = ProtocolSpec {
        sites,
        kind: ProtocolKind::Lcd,
        lu: None,
        ..template.clone()
    };
    match policy {
        LambdaFPolicy::Theory => spec.theory_lambda_f(),
        LambdaFPolicy::Fixed { value } => Ok(value),
        LambdaFPolicy::Brent { .. } => Ok(optimize_lambda_f(&spec, None)?.lambda_f),
    }
}

fn size_rows(
    template: &ProtocolSpec,
    sites: usize,
    lambda_f: f64,
    protocols: &[ScalingProtocol],
) -> Result<Vec<ScalingRow>> {
    let base = ProtocolSpec {
        sites,
        lu: None,
        lambda_f,
        ..template.clone()
    };
    let target = Target::of(&base)?;
    let needs_lcd = protocols.iter().any(|p| {
        !matches!(p, ScalingProtocol::Adiabatic | ScalingProtocol::Linear)
    });
    let lcd_state = if needs_lcd {
        Some(final_state(&base.clone().with_kind(ProtocolKind::Lcd))?)
    } else {
        None
    };
    let mut rows = Vec::with_capacity(protocols.len());
    for p in protocols {
        let fidelity = match p {
            ScalingProtocol::Adiabatic => target.fidelity(&final_state(&base.clone().with_kind(ProtocolKind::Adiabatic))?)?,
            ScalingProtocol::Linear => target.fidelity(&final_state(&base.clone().with_kind(ProtocolKind::Linear))?)?,
            ScalingProtocol::Lcd => target.fidelity(lcd_state.as_ref().expect("computed"))?,
            ScalingProtocol::LcdluFixed { lu } => {
                target.fidelity(&apply_lu(lcd_state.as_ref().expect("computed"), lu)?)?
            }
            ScalingProtocol::LcdluOptimal { mode } => {
                optimize_lu_for_state(lcd_state.as_ref().expect("computed"), &target, *mode)?.fidelity
            }
        };
        let driven = !matches!(p, ScalingProtocol::Adiabatic | ScalingProtocol::Linear);
        rows.push(ScalingRow {
            sites,
            protocol: p.label(),
            lambda_f: if driven { lambda_f } else { 0.0 },
            fidelity,
        });
    }
    Ok(rows)
}

/// Runs every protocol at every size and fits `log₂F = a − cL` per protocol.
///
/// Sizes run in parallel. A failing size is recorded in `failures` and the
/// report is flagged partial; fits use whatever sizes succeeded.
pub fn scaling_experiment(
    template: &ProtocolSpec,
    sizes: &[usize],
    protocols: &[ScalingProtocol],
    policy: LambdaFPolicy,
) -> Result<ScalingReport> {
    if sizes.is_empty() || protocols.is_empty() {
        return usage("scaling experiment needs sizes and protocols");
    }
    let mut sorted = sizes.to_vec();
    sorted.sort_unstable();
    sorted.dedup();

    let mut failures: Vec<(usize, String)> = Vec::new();
    let mut lambdas: BTreeMap<usize, f64> = BTreeMap::new();
    let direct: Vec<usize> = match policy {
        LambdaFPolicy::Brent { max_size } => sorted.iter().copied().filter(|&l| l <= max_size).collect(),
        _ => sorted.clone(),
    };
    let found: Vec<(usize, Result<f64>)> = direct
        .par_iter()
        .map(|&l| (l, lambda_for(template, l, policy)))
        .collect();
    for (l, r) in found {
        match r {
            Ok(v) => {
                lambdas.insert(l, v);
            }
            Err(e) => failures.push((l, e.to_string())),
        }
    }
    if let LambdaFPolicy::Brent { max_size } = policy {
        let reuse = match lambdas.iter().next_back() {
            Some((_, &v)) => Some(v),
            None => {
                // Nothing small enough to optimize: optimize at the smallest size.
                let l = sorted[0];
                match lambda_for(template, l, policy) {
                    Ok(v) => Some(v),
                    Err(e) => {
                        failures.push((l, e.to_string()));
                        None
                    }
                }
            }
        };
        if let Some(v) = reuse {
            for &l in sorted.iter().filter(|&&l| l > max_size) {
                lambdas.insert(l, v);
            }
        }
    }

    let results: Vec<(usize, Result<Vec<ScalingRow>>)> = lambdas
        .par_iter()
        .map(|(&l, &lf)| (l, size_rows(template, l, lf, protocols)))
        .collect();
    let mut rows = Vec::new();
    for (l, r) in results {
        match r {
            Ok(mut v) => rows.append(&mut v),
            Err(e) => failures.push((l, e.to_string())),
        }
    }
    rows.sort_by(|a, b| (a.sites, &a.protocol).cmp(&(b.sites, &b.protocol)));
    failures.sort_by_key(|f| f.0);
    failures.dedup_by_key(|f| f.0);

    let mut fits = Vec::new();
    for p in protocols {
        let label = p.label();
        let (ls, fs): (Vec<usize>, Vec<f64>) = rows
            .iter()
            .filter(|r| r.protocol == label)
            .map(|r| (r.sites, r.fidelity))
            .unzip();
        let mut distinct = ls.clone();
        distinct.dedup();
        if distinct.len() < 2 {
            continue;
        }
        let fit = fit_decay(&ls, &fs)?;
        let residuals = ls
            .iter()
            .zip(&fs)
            .map(|(&l, f)| f.log2() - (fit.intercept - fit.rate * l as f64))
            .collect();
        fits.push(ScalingFit {
            protocol: label,
            fit,
            residuals,
        });
    }
    let partial = !failures.is_empty();
    Ok(ScalingReport {
        rows,
        fits,
        failures,
        partial,
    })
}
