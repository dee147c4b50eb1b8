//! Experiment configuration: TOML file, flag overlay and value grammars.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::protocols::{LocalUnitary, LuMode, ProtocolKind, ProtocolSpec, EulerTriple};
use crate::schedules::Boundary;

fn cfg<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

fn parse_f64(s: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("not a number: {s:?}")))?;
    if !v.is_finite() {
        return cfg(format!("non-finite value {s:?}"));
    }
    Ok(v)
}

fn parse_usize(s: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| Error::Config(format!("not a non-negative integer: {s:?}")))
}

/// How `λ_f` is chosen: `auto` is `1/(4ν)`, `brent` maximizes the final fidelity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LambdaFSetting {
    Auto,
    Brent,
    Value(f64),
}

impl FromStr for LambdaFSetting {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "auto" | "theory" => Ok(LambdaFSetting::Auto),
            "brent" | "opt" | "optimize" => Ok(LambdaFSetting::Brent),
            other => parse_f64(other).map(LambdaFSetting::Value),
        }
    }
}

impl fmt::Display for LambdaFSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LambdaFSetting::Auto => f.write_str("auto"),
            LambdaFSetting::Brent => f.write_str("brent"),
            LambdaFSetting::Value(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum NumOrText {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Serialize for LambdaFSetting {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            LambdaFSetting::Value(v) => s.serialize_f64(*v),
            other => s.serialize_str(&other.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for LambdaFSetting {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match NumOrText::deserialize(d)? {
            NumOrText::Num(v) => Ok(LambdaFSetting::Value(v)),
            NumOrText::Int(v) => Ok(LambdaFSetting::Value(v as f64)),
            NumOrText::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// A fixed post-sweep unitary or an optimizer mode.
#[derive(Clone, Debug, PartialEq)]
pub enum LuChoice {
    Fixed(LocalUnitary),
    Optimize(LuMode),
}

impl Default for LuChoice {
    fn default() -> Self {
        LuChoice::Fixed(LocalUnitary::fixed_x_pi4())
    }
}

fn parse_angles(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(parse_f64).collect()
}

impl FromStr for LuChoice {
    type Err = Error;
    /// `fixed-x-pi4`, `x:θ`, `euler:α,θ,β`, `opt-<mode>`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        if t == "fixed-x-pi4" || t == "fixed" {
            return Ok(LuChoice::default());
        }
        if let Some(rest) = t.strip_prefix("x:") {
            return Ok(LuChoice::Fixed(LocalUnitary::x_rotation(parse_f64(rest)?)));
        }
        if let Some(rest) = t.strip_prefix("euler:") {
            let a = parse_angles(rest)?;
            if a.len() != 3 {
                return cfg(format!("euler LU needs three angles, got {}", a.len()));
            }
            return Ok(LuChoice::Fixed(LocalUnitary::uniform(EulerTriple::new(a[0], a[1], a[2]))));
        }
        for prefix in ["opt-", "optimal-", "optimize-"] {
            if let Some(rest) = t.strip_prefix(prefix) {
                let mode = rest
                    .parse::<LuMode>()
                    .map_err(|e| Error::Config(e.to_string()))?;
                return Ok(LuChoice::Optimize(mode));
            }
        }
        cfg(format!("unknown LU {s:?} (expected fixed-x-pi4, x:θ, euler:α,θ,β or opt-<mode>)"))
    }
}

fn mode_name(m: LuMode) -> String {
    serde_json::to_value(m)
        .ok()
        .and_then(|v| v.as_str().map(|s| s.replace('_', "-")))
        .unwrap_or_default()
}

impl fmt::Display for LuChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LuChoice::Optimize(m) => write!(f, "opt-{}", mode_name(*m)),
            LuChoice::Fixed(lu) if *lu == LocalUnitary::fixed_x_pi4() => f.write_str("fixed-x-pi4"),
            LuChoice::Fixed(LocalUnitary::XRotation { theta }) => write!(f, "x:{theta:e}"),
            LuChoice::Fixed(LocalUnitary::Uniform { triple: t }) => {
                write!(f, "euler:{:e},{:e},{:e}", t.alpha, t.theta, t.beta)
            }
            LuChoice::Fixed(LocalUnitary::PerSite { .. }) => f.write_str("per-site"),
        }
    }
}

impl Serialize for LuChoice {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for LuChoice {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// A grid of real values.
///
/// Text forms: `a,b,c` (explicit), `start:stop:step` (inclusive), `log:min:max:count`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Values(Vec<f64>),
    Step { start: f64, stop: f64, step: f64 },
    Log { min: f64, max: f64, count: usize },
}

impl Grid {
    pub fn points(&self) -> Result<Vec<f64>> {
        let pts = match *self {
            Grid::Values(ref v) => v.clone(),
            Grid::Step { start, stop, step } => {
                if !(step > 0.0 && step.is_finite()) {
                    return cfg(format!("grid step must be positive, got {step}"));
                }
                if stop < start {
                    Vec::new()
                } else {
                    let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
                    (0..n).map(|k| start + k as f64 * step).collect()
                }
            }
            Grid::Log { min, max, count } => {
                if !(min > 0.0 && max >= min) {
                    return cfg(format!("log grid needs 0 < min ≤ max, got [{min}, {max}]"));
                }
                match count {
                    0 => Vec::new(),
                    1 => vec![min],
                    n => {
                        let (a, b) = (min.ln(), max.ln());
                        (0..n)
                            .map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp())
                            .collect()
                    }
                }
            }
        };
        if pts.is_empty() {
            return cfg("grid is empty");
        }
        if pts.iter().any(|x| !x.is_finite()) {
            return cfg("grid contains non-finite values");
        }
        Ok(pts)
    }
}

impl FromStr for Grid {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Grid::Values(Vec::new()));
        }
        if let Some(rest) = s.strip_prefix("log:") {
            let p: Vec<&str> = rest.split(':').collect();
            if p.len() != 3 {
                return cfg(format!("log grid is log:min:max:count, got {s:?}"));
            }
            return Ok(Grid::Log {
                min: parse_f64(p[0])?,
                max: parse_f64(p[1])?,
                count: parse_usize(p[2])?,
            });
        }
        if s.contains(':') {
            let p: Vec<&str> = s.split(':').collect();
            if p.len() != 3 {
                return cfg(format!("range grid is start:stop:step, got {s:?}"));
            }
            return Ok(Grid::Step {
                start: parse_f64(p[0])?,
                stop: parse_f64(p[1])?,
                step: parse_f64(p[2])?,
            });
        }
        Ok(Grid::Values(s.split(',').map(parse_f64).collect::<Result<_>>()?))
    }
}

/// Integer list: `4,6,8`, `4..12` (inclusive) or `4..12:2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct IntList(pub Vec<usize>);

#[derive(Deserialize)]
#[serde(untagged)]
enum IntListRepr {
    List(Vec<usize>),
    Text(String),
}

impl<'de> Deserialize<'de> for IntList {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match IntListRepr::deserialize(d)? {
            IntListRepr::List(v) => Ok(IntList(v)),
            IntListRepr::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

impl IntList {
    pub fn values(&self, what: &str) -> Result<Vec<usize>> {
        if self.0.is_empty() {
            return cfg(format!("{what} list is empty"));
        }
        Ok(self.0.clone())
    }
}

impl FromStr for IntList {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(IntList(Vec::new()));
        }
        if let Some((a, rest)) = s.split_once("..") {
            let (b, step) = match rest.split_once(':') {
                Some((b, st)) => (b, parse_usize(st)?),
                None => (rest, 1),
            };
            if step == 0 {
                return cfg("range step must be positive");
            }
            let (a, b) = (parse_usize(a)?, parse_usize(b)?);
            return Ok(IntList((a..=b).step_by(step).collect()));
        }
        Ok(IntList(s.split(',').map(parse_usize).collect::<Result<_>>()?))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanLambdaConfig {
    pub grid: Option<Grid>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanHxConfig {
    pub grid: Option<Grid>,
    /// Optimizer mode for the optimized-LU column.
    pub lu_mode: Option<LuMode>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingConfig {
    pub sizes: Option<IntList>,
    /// Labels: adiabatic, linear, lcd, lcdlu_fixed, lcdlu_opt_<mode>.
    pub protocols: Option<Vec<String>>,
    /// With `lambda_f = "brent"`, optimize up to this size and reuse beyond.
    pub brent_max_size: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrotterConfig {
    pub sizes: Option<IntList>,
    pub steps: Option<IntList>,
    pub shots: Option<u64>,
    pub kinds: Option<Vec<ProtocolKind>>,
    pub tomography: Option<bool>,
    pub tomography_shots: Option<u64>,
    pub qasm: Option<bool>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExportConfig {
    pub steps: Option<usize>,
    pub format: Option<String>,
}

/// Every field optional so that files and flags can be layered.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(rename = "L")]
    pub sites: Option<usize>,
    pub h_zi: Option<f64>,
    pub h_xf: Option<f64>,
    #[serde(rename = "J_f")]
    pub j_f: Option<f64>,
    pub tau: Option<f64>,
    pub boundary: Option<Boundary>,
    pub kind: Option<ProtocolKind>,
    pub lambda_f: Option<LambdaFSetting>,
    pub lu: Option<LuChoice>,
    pub sample_count: Option<usize>,
    pub tol: Option<f64>,
    pub track_instantaneous: Option<bool>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    #[serde(default)]
    pub scan_lambda: ScanLambdaConfig,
    #[serde(default)]
    pub scan_hx: ScanHxConfig,
    #[serde(default)]
    pub scaling: ScalingConfig,
    #[serde(default)]
    pub trotter: TrotterConfig,
    #[serde(default)]
    pub export: ExportConfig,
}

pub const DEFAULT_SEED: u64 = 20240101;

macro_rules! overlay {
    ($base:expr, $top:expr; $($f:ident),* $(,)?) => {
        $( if $top.$f.is_some() { $base.$f = $top.$f.clone(); } )*
    };
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Fields set in `top` replace those in `self`.
    pub fn overlay(mut self, top: &ExperimentConfig) -> Self {
        overlay!(self, top; sites, h_zi, h_xf, j_f, tau, boundary, kind, lambda_f, lu,
            sample_count, tol, track_instantaneous, out, seed, jobs);
        overlay!(self.scan_lambda, top.scan_lambda; grid);
        overlay!(self.scan_hx, top.scan_hx; grid, lu_mode);
        overlay!(self.scaling, top.scaling; sizes, protocols, brent_max_size);
        overlay!(self.trotter, top.trotter; sizes, steps, shots, kinds, tomography,
            tomography_shots, qasm);
        overlay!(self.export, top.export; steps, format);
        self
    }

    /// Fills every unset field with its default.
    pub fn resolved(&self) -> Self {
        let d = ProtocolSpec::default();
        let mut c = self.clone();
        c.sites.get_or_insert(d.sites);
        c.h_zi.get_or_insert(d.h_zi);
        c.h_xf.get_or_insert(d.h_xf);
        c.j_f.get_or_insert(d.j_f);
        c.tau.get_or_insert(d.tau);
        c.boundary.get_or_insert(d.boundary);
        c.kind.get_or_insert(d.kind);
        c.lambda_f.get_or_insert(LambdaFSetting::Auto);
        c.lu.get_or_insert_with(LuChoice::default);
        c.sample_count.get_or_insert(d.sample_count);
        c.tol.get_or_insert(d.tol);
        c.track_instantaneous.get_or_insert(d.track_instantaneous);
        c.out.get_or_insert_with(|| PathBuf::from("out"));
        c.seed.get_or_insert(DEFAULT_SEED);
        c.scan_lambda.grid.get_or_insert(Grid::Step {
            start: 0.0,
            stop: 6.0,
            step: 0.05,
        });
        c.scan_hx.grid.get_or_insert(Grid::Log {
            min: 0.2,
            max: 10.0,
            count: 24,
        });
        c.scan_hx.lu_mode.get_or_insert(LuMode::Uniform);
        c.scaling.sizes.get_or_insert(IntList(vec![4, 6, 8, 10, 12]));
        c.scaling.protocols.get_or_insert_with(|| {
            ["adiabatic", "lcd", "lcdlu_fixed", "lcdlu_opt_uniform"]
                .map(String::from)
                .to_vec()
        });
        c.scaling.brent_max_size.get_or_insert(8);
        c.trotter.sizes.get_or_insert(IntList((2..=14).collect()));
        c.trotter.steps.get_or_insert(IntList(vec![20]));
        c.trotter.shots.get_or_insert(1000);
        c.trotter
            .kinds
            .get_or_insert_with(|| vec![ProtocolKind::Lcd, ProtocolKind::Lcdlu]);
        c.trotter.tomography.get_or_insert(false);
        c.trotter.tomography_shots.get_or_insert(400);
        c.trotter.qasm.get_or_insert(false);
        c.export.steps.get_or_insert(20);
        c.export.format.get_or_insert_with(|| "qasm2".into());
        c
    }

    /// Protocol spec of a resolved config; `lambda_f` is left at the numeric
    /// value if one was given and at 0 otherwise.
    pub fn spec(&self) -> Result<ProtocolSpec> {
        let r = self.resolved();
        let lu = match (r.kind, r.lu.as_ref()) {
            (Some(ProtocolKind::Lcdlu), Some(LuChoice::Fixed(lu))) => Some(lu.clone()),
            (Some(ProtocolKind::Lcdlu), _) => Some(LocalUnitary::fixed_x_pi4()),
            _ => None,
        };
        let spec = ProtocolSpec {
            sites: r.sites.unwrap(),
            h_zi: r.h_zi.unwrap(),
            h_xf: r.h_xf.unwrap(),
            j_f: r.j_f.unwrap(),
            tau: r.tau.unwrap(),
            boundary: r.boundary.unwrap(),
            kind: r.kind.unwrap(),
            lambda_f: match r.lambda_f.unwrap() {
                LambdaFSetting::Value(v) => v,
                _ => 0.0,
            },
            lu,
            sample_count: r.sample_count.unwrap(),
            tol: r.tol.unwrap(),
            track_instantaneous: r.track_instantaneous.unwrap(),
        };
        spec.validate()?;
        Ok(spec)
    }
}
