//! Optimization of the drive amplitude `λ_f` and of the post-sweep unitary.

use std::f64::consts::{FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use super::lu::{apply_lu, EulerTriple, LocalUnitary};
use super::run::{final_state, ProtocolKind, ProtocolSpec, Target};
use crate::engine::StateVector;
use crate::error::{usage, Result};
use crate::optimize::{minimize_bounded, nelder_mead, scan_then_refine, BrentOptions, NelderMeadOptions};

/// Abscissa tolerance for `λ_f`.
pub const LAMBDA_F_XTOL: f64 = 1e-4;
/// Tolerance for LU angles.
pub const LU_XTOL: f64 = 1e-6;
const SCAN_POINTS: usize = 33;

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct LambdaFOptimum {
    pub lambda_f: f64,
    pub fidelity: f64,
    pub evaluations: usize,
    /// The bracketed search hit an edge and the scan fallback was used.
    pub fallback: bool,
}

/// Final fidelity as a function of `λ_f`, target shared across evaluations.
pub struct LambdaFObjective {
    spec: ProtocolSpec,
    target: Target,
}

impl LambdaFObjective {
    pub fn new(spec: &ProtocolSpec) -> Result<Self> {
        spec.validate()?;
        if !spec.kind.is_driven() {
            return usage(format!("λ_f has no effect on a {} protocol", spec.kind));
        }
        Ok(LambdaFObjective {
            spec: spec.clone(),
            target: Target::of(spec)?,
        })
    }

    pub fn target(&self) -> &Target {
        &self.target
    }

    /// Fidelity of the final (post-LU for `lcdlu`) state.
    pub fn fidelity(&self, lambda_f: f64) -> Result<f64> {
        let spec = self.spec.clone().with_lambda_f(lambda_f);
        let psi = final_state(&spec)?;
        let psi = match (&spec.kind, &spec.lu) {
            (ProtocolKind::Lcdlu, Some(lu)) => apply_lu(&psi, lu)?,
            _ => psi,
        };
        self.target.fidelity(&psi)
    }
}

/// Default search interval `[0.5, 1.5] / (4ν)`.
pub fn default_bracket(spec: &ProtocolSpec) -> Result<(f64, f64)> {
    let l = spec.theory_lambda_f()?;
    let (a, b) = (0.5 * l, 1.5 * l);
    Ok((a.min(b), a.max(b)))
}

/// Maximizes the final fidelity over `λ_f` in `bracket` by minimizing `1 − F`.
pub fn optimize_lambda_f(spec: &ProtocolSpec, bracket: Option<(f64, f64)>) -> Result<LambdaFOptimum> {
    let obj = LambdaFObjective::new(spec)?;
    let (a, b) = match bracket {
        Some(br) => br,
        None => default_bracket(spec)?,
    };
    let opts = BrentOptions {
        xtol: LAMBDA_F_XTOL,
        ..Default::default()
    };
    let m = minimize_bounded(|x| Ok(1.0 - obj.fidelity(x)?), a, b, &opts)?;
    let edge = 2.0 * LAMBDA_F_XTOL + 1e-9 * m.x.abs();
    if (m.x - a).abs() > edge && (b - m.x).abs() > edge {
        return Ok(LambdaFOptimum {
            lambda_f: m.x,
            fidelity: 1.0 - m.value,
            evaluations: m.evaluations,
            fallback: false,
        });
    }
    // Optimum sits on the bracket edge: scan a widened interval instead.
    let w = b - a;
    let (lo, hi) = ((a - w).max(0.0).min(a), b + w);
    let s = scan_then_refine(|x| Ok(1.0 - obj.fidelity(x)?), lo, hi, SCAN_POINTS, &opts)?;
    let (x, v) = if s.value <= m.value { (s.x, s.value) } else { (m.x, m.value) };
    Ok(LambdaFOptimum {
        lambda_f: x,
        fidelity: 1.0 - v,
        evaluations: m.evaluations + s.evaluations,
        fallback: true,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LuMode {
    /// Independent triple per site (3L parameters).
    General,
    /// One triple shared by all sites.
    Uniform,
    XOnly,
    ZOnly,
    YOnly,
}

impl std::str::FromStr for LuMode {
    type Err = crate::error::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "general" => Ok(LuMode::General),
            "uniform" => Ok(LuMode::Uniform),
            "x_only" | "x" => Ok(LuMode::XOnly),
            "z_only" | "z" => Ok(LuMode::ZOnly),
            "y_only" | "y" => Ok(LuMode::YOnly),
            other => usage(format!("unknown LU mode {other:?}")),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LuOptimum {
    pub lu: LocalUnitary,
    pub fidelity: f64,
    /// Fidelity of the state before the unitary.
    pub lcd_fidelity: f64,
    pub evaluations: usize,
    /// The optimizer stopped on its budget rather than its tolerance.
    pub stagnated: bool,
}

/// Optimizes a local unitary applied to the LCD final state of `spec` (at its `λ_f`).
pub fn optimize_lu(spec: &ProtocolSpec, mode: LuMode) -> Result<LuOptimum> {
    let lcd = spec.clone().with_kind(ProtocolKind::Lcd);
    lcd.validate()?;
    let target = Target::of(&lcd)?;
    let psi = final_state(&lcd)?;
    optimize_lu_for_state(&psi, &target, mode)
}

/// As [`optimize_lu`] for a given pre-LU state and target.
pub fn optimize_lu_for_state(psi: &StateVector, target: &Target, mode: LuMode) -> Result<LuOptimum> {
    let len = psi.len();
    let lcd_fidelity = target.fidelity(psi)?;
    let score = |lu: &LocalUnitary| -> Result<f64> { target.fidelity(&apply_lu(psi, lu)?) };
    let brent = BrentOptions {
        xtol: LU_XTOL,
        ..Default::default()
    };
    let single = |make: fn(f64) -> LocalUnitary| -> Result<LuOptimum> {
        let m = scan_then_refine(|x| Ok(1.0 - score(&make(x))?), -PI, PI, SCAN_POINTS, &brent)?;
        Ok(LuOptimum {
            lu: make(m.x),
            fidelity: 1.0 - m.value,
            lcd_fidelity,
            evaluations: m.evaluations,
            stagnated: !m.converged,
        })
    };
    let nm = NelderMeadOptions {
        tol: LU_XTOL,
        max_evaluations: 4000 + 400 * len,
        ..Default::default()
    };
    match mode {
        LuMode::XOnly => single(LocalUnitary::x_rotation),
        LuMode::ZOnly => single(|a| LocalUnitary::uniform(EulerTriple::z(a))),
        LuMode::YOnly => single(|t| LocalUnitary::uniform(EulerTriple::y(t))),
        LuMode::Uniform => {
            let build = |p: &[f64]| LocalUnitary::uniform(EulerTriple::new(p[0], p[1], p[2]));
            let m = nelder_mead(|p| Ok(1.0 - score(&build(p))?), &[0.0, FRAC_PI_4, 0.0], &nm)?;
            Ok(LuOptimum {
                lu: build(&m.x),
                fidelity: 1.0 - m.value,
                lcd_fidelity,
                evaluations: m.evaluations,
                stagnated: !m.converged,
            })
        }
        LuMode::General => {
            let build = |p: &[f64]| {
                LocalUnitary::per_site(
                    p.chunks(3)
                        .map(|c| EulerTriple::new(c[0], c[1], c[2]))
                        .collect(),
                )
            };
            let x0: Vec<f64> = (0..len).flat_map(|_| [0.0, FRAC_PI_4, 0.0]).collect();
            let m = nelder_mead(|p| Ok(1.0 - score(&build(p))?), &x0, &nm)?;
            Ok(LuOptimum {
                lu: build(&m.x),
                fidelity: 1.0 - m.value,
                lcd_fidelity,
                evaluations: m.evaluations,
                stagnated: !m.converged,
            })
        }
    }
}
