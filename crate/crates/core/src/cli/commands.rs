//! One function per subcommand; each writes its files into the output directory.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::config::{ExperimentConfig, LambdaFSetting, LuChoice};
use super::output::{row, Cell, OutDir};
use crate::error::{Error, Result};
use crate::protocols::{
    apply_lu, final_state, optimize_lambda_f, optimize_lu, optimize_lu_for_state, run, scaling_experiment,
    LambdaFObjective, LambdaFPolicy, LocalUnitary, LuMode, ProtocolKind, ProtocolSpec, ScalingProtocol, Target,
};
use crate::schedules::{nu_lambda_f, schedule_table};
use crate::trotter::{
    estimate_energy, exact_energy, export_circuit, sample, synthesize, to_qasm, tomography_of_state, Basis,
    CircuitFormat, ShotRecord, MAX_TOMOGRAPHY_SITES,
};

fn config_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

/// Sidecar contents: the command and the fully resolved configuration.
#[derive(Serialize)]
struct Meta<'a> {
    command: &'a str,
    config: &'a ExperimentConfig,
}

/// SplitMix64 finalizer over the base seed and a task key.
fn derive_seed(seed: u64, key: &[u64]) -> u64 {
    let mut z = seed;
    for &k in key {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_add(k);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
    }
    z
}

/// `λ_f` for `spec` under `setting`. Undriven kinds ignore the drive, so
/// `auto`/`brent` resolve to 0 for them.
pub fn resolve_lambda_f(spec: &ProtocolSpec, setting: LambdaFSetting, lu: &LuChoice) -> Result<f64> {
    match setting {
        LambdaFSetting::Value(v) => Ok(v),
        _ if !spec.kind.is_driven() => Ok(0.0),
        LambdaFSetting::Auto => spec.theory_lambda_f(),
        LambdaFSetting::Brent => {
            // An LU still to be optimized cannot enter the objective; tune the bare LCD sweep.
            let s = match lu {
                LuChoice::Optimize(_) => spec.clone().with_kind(ProtocolKind::Lcd),
                LuChoice::Fixed(_) => spec.clone(),
            };
            Ok(optimize_lambda_f(&s, None)?.lambda_f)
        }
    }
}

fn fixed_lu(lu: &LuChoice) -> LocalUnitary {
    match lu {
        LuChoice::Fixed(l) => l.clone(),
        LuChoice::Optimize(_) => LocalUnitary::fixed_x_pi4(),
    }
}

/// Fully resolved spec, with `λ_f` and (for `lcdlu`) the unitary settled.
fn resolve_spec(cfg: &ExperimentConfig, base: ProtocolSpec) -> Result<(ProtocolSpec, Option<crate::protocols::LuOptimum>)> {
    let lu = cfg.lu.clone().unwrap_or_default();
    let mut spec = base;
    spec.lambda_f = resolve_lambda_f(&spec, cfg.lambda_f.unwrap_or(LambdaFSetting::Auto), &lu)?;
    let mut lu_opt = None;
    if spec.kind == ProtocolKind::Lcdlu {
        match &lu {
            LuChoice::Fixed(l) => spec.lu = Some(l.clone()),
            LuChoice::Optimize(mode) => {
                let o = optimize_lu(&spec, *mode)?;
                spec.lu = Some(o.lu.clone());
                lu_opt = Some(o);
            }
        }
    }
    Ok((spec, lu_opt))
}

pub fn cmd_run(cfg: &ExperimentConfig, out: &OutDir) -> Result<()> {
    let meta = Meta { command: "run", config: cfg };
    let (spec, lu_opt) = resolve_spec(cfg, cfg.spec()?)?;
    let result = run(&spec)?;

    let rows: Vec<Vec<Cell>> = (0..result.times.len())
        .map(|i| {
            let inst = match &result.instantaneous_fidelity {
                Some(v) => Cell::F(v[i]),
                None => Cell::S(String::new()),
            };
            vec![
                Cell::F(result.times[i]),
                inst,
                Cell::F(result.target_fidelity[i]),
                Cell::F(result.norm_drift[i]),
                Cell::F(result.energy[i]),
            ]
        })
        .collect();
    out.csv(
        "trajectory.csv",
        &["t", "F_instantaneous", "F_target", "norm_drift", "energy"],
        &rows,
        &meta,
    )?;

    let drive = if spec.kind.is_driven() { spec.lambda_f } else { 0.0 };
    let table = schedule_table(&spec.model(), &spec.sweep()?, drive, spec.sample_count.max(2))?;
    let rows: Vec<Vec<Cell>> = table
        .iter()
        .map(|r| row![r.t, r.lambda, r.dlambda_dt, r.h_z, r.h_x, r.j, r.alpha, r.cd_amplitude])
        .collect();
    out.csv(
        "schedule.csv",
        &["t", "lambda", "dlambda_dt", "h_z", "h_x", "J", "alpha", "cd_amplitude"],
        &rows,
        &meta,
    )?;

    let peak = result.peak_index();
    let nu = nu_lambda_f(&spec.model()).ok();
    let summary = json!({
        "record": result.record(Some("trajectory.csv".into())),
        "lambda_f_setting": cfg.lambda_f,
        "nu": nu,
        "lambda_f_theory": nu.map(|v| 0.25 / v),
        "max_norm_drift": result.max_norm_drift,
        "peak_time": result.times[peak],
        "peak_fidelity": result.target_fidelity[peak],
        "lu_optimum": lu_opt,
        "config": cfg,
    });
    out.json("summary.json", &summary)?;
    println!(
        "{} L={} h_xf={} lambda_f={:.6} F_pre_lu={:.6} F_final={:.6} E_ratio={:.6}",
        spec.kind, spec.sites, spec.h_xf, spec.lambda_f, result.pre_lu_fidelity, result.final_fidelity, result.energy_ratio
    );
    Ok(())
}

/// Indices of interior local maxima of `f`.
pub fn grid_maxima(f: &[f64]) -> Vec<usize> {
    (1..f.len().saturating_sub(1))
        .filter(|&i| f[i] > f[i - 1] && f[i] >= f[i + 1])
        .collect()
}

pub fn cmd_scan_lambda(cfg: &ExperimentConfig, out: &OutDir) -> Result<()> {
    let meta = Meta { command: "scan-lambda", config: cfg };
    let grid = cfg.scan_lambda.grid.as_ref().expect("resolved").points()?;
    let mut spec = cfg.spec()?;
    if !spec.kind.is_driven() {
        return config_err(format!("scan-lambda needs a driven kind (lcd or lcdlu), got {}", spec.kind));
    }
    if spec.kind == ProtocolKind::Lcdlu {
        if let Some(LuChoice::Optimize(_)) = cfg.lu {
            return config_err("scan-lambda with lcdlu needs a fixed LU");
        }
        spec.lu = Some(fixed_lu(cfg.lu.as_ref().expect("resolved")));
    }
    let obj = LambdaFObjective::new(&spec)?;
    let fid: Vec<f64> = grid.par_iter().map(|&l| obj.fidelity(l)).collect::<Result<_>>()?;
    let rows: Vec<Vec<Cell>> = grid.iter().zip(&fid).map(|(&l, &f)| row![l, f]).collect();
    out.csv("scan_lambda.csv", &["lambda_f", "F_final"], &rows, &meta)?;

    let nu = nu_lambda_f(&spec.model())?;
    let maxima: Vec<f64> = grid_maxima(&fid).into_iter().map(|i| grid[i]).collect();
    let spacing = (maxima.len() >= 2).then(|| maxima[1] - maxima[0]);
    out.json(
        "scan_lambda.json",
        &json!({
            "nu": nu,
            "period": 1.0 / nu,
            "lambda_f_theory": 0.25 / nu,
            "grid_maxima": maxima,
            "maxima_spacing": spacing,
            "config": cfg,
        }),
    )?;
    println!(
        "scanned {} points: nu={nu:.6} 1/(4nu)={:.6} maxima={maxima:?}",
        grid.len(),
        0.25 / nu
    );
    Ok(())
}

pub fn cmd_scan_hx(cfg: &ExperimentConfig, out: &OutDir) -> Result<()> {
    let meta = Meta { command: "scan-hx", config: cfg };
    let grid = cfg.scan_hx.grid.as_ref().expect("resolved").points()?;
    let base = cfg.spec()?;
    let setting = cfg.lambda_f.unwrap_or(LambdaFSetting::Auto);
    let fixed = fixed_lu(cfg.lu.as_ref().expect("resolved"));
    let mode = cfg.scan_hx.lu_mode.unwrap_or(LuMode::Uniform);

    let rows: Vec<Vec<Cell>> = grid
        .par_iter()
        .map(|&h| -> Result<Vec<Cell>> {
            let lcd = ProtocolSpec {
                h_xf: h,
                kind: ProtocolKind::Lcd,
                lu: None,
                ..base.clone()
            };
            lcd.validate()?;
            let nu = nu_lambda_f(&lcd.model())?;
            let lambda_f = resolve_lambda_f(&lcd, setting, &LuChoice::Fixed(fixed.clone()))?;
            let lcd = lcd.with_lambda_f(lambda_f);
            let target = Target::of(&lcd)?;
            let adiabatic = target.fidelity(&final_state(&lcd.clone().with_kind(ProtocolKind::Adiabatic))?)?;
            let psi = final_state(&lcd)?;
            let f_lcd = target.fidelity(&psi)?;
            let f_fixed = target.fidelity(&apply_lu(&psi, &fixed)?)?;
            let opt = optimize_lu_for_state(&psi, &target, mode)?;
            Ok(row![h, nu, 0.25 / nu, lambda_f, adiabatic, f_lcd, f_fixed, opt.fidelity])
        })
        .collect::<Result<_>>()?;
    out.csv(
        "scan_hx.csv",
        &[
            "h_xf",
            "nu",
            "lambda_f_theory",
            "lambda_f",
            "F_adiabatic",
            "F_lcd",
            "F_lcdlu_fixed",
            "F_lcdlu_opt",
        ],
        &rows,
        &meta,
    )?;
    println!("scanned {} h_xf values", grid.len());
    Ok(())
}

/// Parses a scaling protocol label.
pub fn scaling_protocol(label: &str, lu: &LuChoice) -> Result<ScalingProtocol> {
    let l = label.trim().to_ascii_lowercase().replace('-', "_");
    match l.as_str() {
        "adiabatic" => Ok(ScalingProtocol::Adiabatic),
        "linear" => Ok(ScalingProtocol::Linear),
        "lcd" => Ok(ScalingProtocol::Lcd),
        "lcdlu_fixed" | "lcdlu" => Ok(ScalingProtocol::LcdluFixed { lu: fixed_lu(lu) }),
        other => match other.strip_prefix("lcdlu_opt_") {
            Some(m) => Ok(ScalingProtocol::LcdluOptimal {
                mode: m.parse().map_err(|e: Error| Error::Config(e.to_string()))?,
            }),
            None => config_err(format!("unknown scaling protocol {label:?}")),
        },
    }
}

pub fn cmd_scaling(cfg: &ExperimentConfig, out: &OutDir) -> Result<()> {
    let meta = Meta { command: "scaling", config: cfg };
    let sizes = cfg.scaling.sizes.as_ref().expect("resolved").values("size")?;
    let mut distinct = sizes.clone();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 2 {
        return config_err("a scaling fit needs at least two distinct sizes");
    }
    let lu = cfg.lu.clone().unwrap_or_default();
    let labels = cfg.scaling.protocols.as_ref().expect("resolved");
    if labels.is_empty() {
        return config_err("protocol list is empty");
    }
    let protocols: Vec<ScalingProtocol> = labels.iter().map(|l| scaling_protocol(l, &lu)).collect::<Result<_>>()?;
    let policy = match cfg.lambda_f.unwrap_or(LambdaFSetting::Auto) {
        LambdaFSetting::Auto => LambdaFPolicy::Theory,
        LambdaFSetting::Brent => LambdaFPolicy::Brent {
            max_size: cfg.scaling.brent_max_size.unwrap_or(8),
        },
        LambdaFSetting::Value(value) => LambdaFPolicy::Fixed { value },
    };
    let template = ProtocolSpec {
        sites: distinct[0],
        ..cfg.spec()?
    };
    let report = scaling_experiment(&template, &sizes, &protocols, policy)?;

    let rows: Vec<Vec<Cell>> = report
        .rows
        .iter()
        .map(|r| row![r.sites, r.protocol.as_str(), r.lambda_f, r.fidelity])
        .collect();
    out.csv("scaling.csv", &["L", "protocol", "lambda_f", "F_final"], &rows, &meta)?;
    out.json(
        "scaling_fit.json",
        &json!({
            "policy": policy,
            "fits": report.fits,
            "failures": report.failures,
            "partial": report.partial,
            "config": cfg,
        }),
    )?;
    for f in &report.fits {
        println!("{:<22} c={:.4} a={:.4}", f.protocol, f.fit.rate, f.fit.intercept);
    }
    if report.partial {
        let msg: Vec<String> = report.failures.iter().map(|(l, e)| format!("L={l}: {e}")).collect();
        return Err(Error::Integration(format!("scaling run incomplete: {}", msg.join("; "))));
    }
    Ok(())
}

#[derive(Serialize)]
struct TomographyRecord {
    #[serde(rename = "L")]
    sites: usize,
    protocol: String,
    steps: usize,
    shots_per_setting: u64,
    seed: u64,
    fidelity: f64,
    raw_min_eigenvalue: f64,
    trace: f64,
    expectations: BTreeMap<String, f64>,
    /// Row-major `[re, im]` entries of the reconstructed density matrix.
    rho: Vec<Vec<[f64; 2]>>,
}

struct TrotterPoint {
    row: Vec<Cell>,
    key: String,
    histogram: ShotRecord,
    qasm: Option<String>,
    tomography: Option<TomographyRecord>,
}

pub fn cmd_trotter(cfg: &ExperimentConfig, out: &OutDir) -> Result<()> {
    let meta = Meta { command: "trotter", config: cfg };
    let t = &cfg.trotter;
    let sizes = t.sizes.as_ref().expect("resolved").values("size")?;
    let steps = t.steps.as_ref().expect("resolved").values("steps")?;
    let kinds = t.kinds.clone().unwrap_or_default();
    if kinds.is_empty() {
        return config_err("trotter kind list is empty");
    }
    if steps.contains(&0) {
        return config_err("Trotter step counts must be positive");
    }
    let shots = t.shots.unwrap_or(1000);
    let tomo_shots = t.tomography_shots.unwrap_or(400);
    if shots == 0 || tomo_shots == 0 {
        return config_err("shot counts must be positive");
    }
    let seed = cfg.seed.unwrap_or(super::config::DEFAULT_SEED);
    let base = cfg.spec()?;
    for &l in &sizes {
        ProtocolSpec { sites: l, ..base.clone() }.validate()?;
    }

    let tasks: Vec<(usize, ProtocolKind, usize)> = sizes
        .iter()
        .flat_map(|&l| {
            let steps = &steps;
            kinds.iter().flat_map(move |&k| steps.iter().map(move |&s| (l, k, s)))
        })
        .collect();
    let points: Vec<TrotterPoint> = tasks
        .par_iter()
        .map(|&(l, kind, n)| -> Result<TrotterPoint> {
            let spec = ProtocolSpec {
                sites: l,
                kind,
                lu: None,
                ..base.clone()
            }
            .with_kind(kind);
            let (spec, _) = resolve_spec(cfg, spec)?;
            let target = Target::of(&spec)?;
            let circuit = synthesize(&spec, n)?;
            let psi = circuit.prepare()?;
            let key = [l as u64, kind as u64, n as u64];
            let z = sample(&psi, Basis::Z, shots, derive_seed(seed, &[key[0], key[1], key[2], 0]))?;
            let x = sample(&psi, Basis::X, shots, derive_seed(seed, &[key[0], key[1], key[2], 1]))?;
            let est = estimate_energy(&z, &x, spec.h_xf, spec.j_f, spec.boundary)?;
            let exact = exact_energy(&psi, spec.h_xf, spec.j_f, spec.boundary);
            let e0 = target.ground.energy;
            let fid = target.fidelity(&psi)?;
            let tomography = if t.tomography == Some(true) && l <= MAX_TOMOGRAPHY_SITES {
                let ts = derive_seed(seed, &[key[0], key[1], key[2], 2]);
                let r = tomography_of_state(&psi, tomo_shots, ts)?;
                Some(TomographyRecord {
                    sites: l,
                    protocol: kind.to_string(),
                    steps: n,
                    shots_per_setting: tomo_shots,
                    seed: ts,
                    fidelity: r.fidelity(&psi)?,
                    raw_min_eigenvalue: r.raw_min_eigenvalue,
                    trace: r.trace(),
                    rho: (0..r.rho.nrows())
                        .map(|i| (0..r.rho.ncols()).map(|j| [r.rho[(i, j)].re, r.rho[(i, j)].im]).collect())
                        .collect(),
                    expectations: r.expectations,
                })
            } else {
                None
            };
            Ok(TrotterPoint {
                row: row![
                    l,
                    kind.name(),
                    n,
                    spec.lambda_f,
                    est.energy,
                    est.stderr,
                    exact.energy,
                    e0,
                    est.energy / e0,
                    exact.energy / e0,
                    fid,
                ],
                key: format!("L{l}_{kind}_T{n}"),
                histogram: z,
                qasm: (t.qasm == Some(true)).then(|| to_qasm(&circuit)),
                tomography,
            })
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(points.len());
    let mut histograms = BTreeMap::new();
    let mut tomo = Vec::new();
    for p in points {
        rows.push(p.row);
        if let Some(q) = p.qasm {
            out.text(&format!("circuits/{}.qasm", p.key), &q)?;
        }
        if let Some(r) = p.tomography {
            tomo.push(r);
        }
        histograms.insert(p.key, p.histogram);
    }
    out.csv(
        "trotter_energy.csv",
        &[
            "L",
            "protocol",
            "steps",
            "lambda_f",
            "E_estimate",
            "E_stderr",
            "E_exact",
            "E_ground",
            "ratio_estimate",
            "ratio_exact",
            "F_target",
        ],
        &rows,
        &meta,
    )?;
    out.json("z_histograms.json", &histograms)?;
    if t.tomography == Some(true) {
        out.json("tomography.json", &tomo)?;
    }
    println!("{} circuits sampled with {shots} shots per basis", rows.len());
    Ok(())
}

/// Writes the circuit to `dest`, or returns its text when `dest` is `None`.
pub fn cmd_export_circuit(cfg: &ExperimentConfig, dest: Option<&std::path::Path>) -> Result<Option<String>> {
    let steps = cfg.export.steps.unwrap_or(20);
    let format: CircuitFormat = cfg
        .export
        .format
        .as_deref()
        .unwrap_or("qasm2")
        .parse()
        .map_err(|e: Error| Error::Config(e.to_string()))?;
    let (spec, _) = resolve_spec(cfg, cfg.spec()?)?;
    let circuit = synthesize(&spec, steps)?;
    let text = export_circuit(&circuit, format)?;
    match dest {
        Some(p) => {
            std::fs::write(p, &text)?;
            Ok(None)
        }
        None => Ok(Some(text)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_differ_per_task() {
        assert_ne!(derive_seed(1, &[4, 2, 20, 0]), derive_seed(1, &[4, 2, 20, 1]));
        assert_eq!(derive_seed(9, &[3]), derive_seed(9, &[3]));
    }

    #[test]
    fn maxima_detection() {
        assert_eq!(grid_maxima(&[0.0, 1.0, 0.5, 0.7, 0.6]), vec![1, 3]);
        assert!(grid_maxima(&[1.0]).is_empty());
    }

    #[test]
    fn protocol_labels() {
        let lu = LuChoice::default();
        assert_eq!(scaling_protocol("lcdlu_opt_uniform", &lu).unwrap().label(), "lcdlu_opt_uniform");
        assert!(scaling_protocol("nope", &lu).is_err());
    }
}
