//! Command-line front end: config loading, flag overrides and dispatch.

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

pub use config::{ExperimentConfig, Grid, IntList, LambdaFSetting, LuChoice};

use crate::error::{Error, Result};
use output::OutDir;

#[derive(Debug, Parser)]
#[command(name = "lcdrive", version, about = "Counterdiabatic state preparation for the transverse-field Ising ring")]
pub struct Cli {
    /// TOML experiment config; flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for sweeps.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

/// Protocol parameters shared by every subcommand.
#[derive(Debug, Default, Args)]
pub struct SpecArgs {
    #[arg(long = "L", value_name = "L")]
    pub sites: Option<usize>,
    #[arg(long)]
    pub hzi: Option<f64>,
    #[arg(long)]
    pub hxf: Option<f64>,
    #[arg(long)]
    pub jf: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    /// periodic | antiperiodic | auto
    #[arg(long)]
    pub boundary: Option<String>,
    /// adiabatic | linear | lcd | lcdlu
    #[arg(long)]
    pub kind: Option<String>,
    /// auto | brent | <number>
    #[arg(long = "lambda-f", allow_negative_numbers = true)]
    pub lambda_f: Option<String>,
    /// fixed-x-pi4 | x:θ | euler:α,θ,β | opt-<general|uniform|x-only|y-only|z-only>
    #[arg(long)]
    pub lu: Option<String>,
    /// Trajectory sample count.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Integrator tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Also record the fidelity to the instantaneous ground state.
    #[arg(long)]
    pub instantaneous: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one protocol: trajectory, schedule and summary.
    Run {
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Final fidelity over a λ_f grid.
    ScanLambda {
        #[command(flatten)]
        spec: SpecArgs,
        /// start:stop:step, log:min:max:count or a comma list.
        #[arg(long)]
        grid: Option<String>,
    },
    /// Protocol comparison over an h_xf grid.
    ScanHx {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        grid: Option<String>,
        /// Optimizer mode for the optimized-LU column.
        #[arg(long)]
        lu_mode: Option<String>,
    },
    /// Final fidelity against system size with exponential fits.
    Scaling {
        #[command(flatten)]
        spec: SpecArgs,
        /// 4,6,8 or 4..12 or 4..12:2
        #[arg(long)]
        sizes: Option<String>,
        /// Comma list of protocol labels.
        #[arg(long)]
        protocols: Option<String>,
        #[arg(long)]
        brent_max_size: Option<usize>,
    },
    /// Trotterized circuits, shot-based energies and optional tomography.
    Trotter {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        sizes: Option<String>,
        #[arg(long)]
        steps: Option<String>,
        #[arg(long)]
        shots: Option<u64>,
        /// Comma list of kinds to digitize.
        #[arg(long)]
        kinds: Option<String>,
        #[arg(long)]
        tomography: bool,
        #[arg(long)]
        tomography_shots: Option<u64>,
        /// Also write each circuit as OpenQASM.
        #[arg(long)]
        qasm: bool,
    },
    /// Print or write one synthesized circuit.
    ExportCircuit {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        steps: Option<usize>,
        /// qasm2 | json
        #[arg(long)]
        format: Option<String>,
        /// Destination file (stdout when omitted).
        #[arg(long, value_name = "PATH")]
        output: Option<PathBuf>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Run { .. } => "run",
            Command::ScanLambda { .. } => "scan-lambda",
            Command::ScanHx { .. } => "scan-hx",
            Command::Scaling { .. } => "scaling",
            Command::Trotter { .. } => "trotter",
            Command::ExportCircuit { .. } => "export-circuit",
        }
    }

    fn spec_args(&self) -> &SpecArgs {
        match self {
            Command::Run { spec }
            | Command::ScanLambda { spec, .. }
            | Command::ScanHx { spec, .. }
            | Command::Scaling { spec, .. }
            | Command::Trotter { spec, .. }
            | Command::ExportCircuit { spec, .. } => spec,
        }
    }
}

fn parse_cfg<T: std::str::FromStr<Err = Error>>(s: &Option<String>) -> Result<Option<T>> {
    s.as_deref()
        .map(|v| v.parse().map_err(|e: Error| Error::Config(e.to_string())))
        .transpose()
}

fn parse_list<T: std::str::FromStr<Err = Error>>(s: &Option<String>) -> Result<Option<Vec<T>>> {
    s.as_deref()
        .map(|v| {
            v.split(',')
                .filter(|x| !x.trim().is_empty())
                .map(|x| x.trim().parse().map_err(|e: Error| Error::Config(e.to_string())))
                .collect()
        })
        .transpose()
}

impl Cli {
    /// Flags as a config overlay.
    pub fn overrides(&self) -> Result<ExperimentConfig> {
        let a = self.command.spec_args();
        let mut c = ExperimentConfig {
            sites: a.sites,
            h_zi: a.hzi,
            h_xf: a.hxf,
            j_f: a.jf,
            tau: a.tau,
            boundary: parse_cfg(&a.boundary)?,
            kind: parse_cfg(&a.kind)?,
            lambda_f: parse_cfg(&a.lambda_f)?,
            lu: parse_cfg(&a.lu)?,
            sample_count: a.samples,
            tol: a.tol,
            track_instantaneous: a.instantaneous.then_some(true),
            out: self.out.clone(),
            seed: self.seed,
            jobs: self.jobs,
            ..Default::default()
        };
        match &self.command {
            Command::Run { .. } => {}
            Command::ScanLambda { grid, .. } => c.scan_lambda.grid = parse_cfg(grid)?,
            Command::ScanHx { grid, lu_mode, .. } => {
                c.scan_hx.grid = parse_cfg(grid)?;
                c.scan_hx.lu_mode = parse_cfg(lu_mode)?;
            }
            Command::Scaling {
                sizes,
                protocols,
                brent_max_size,
                ..
            } => {
                c.scaling.sizes = parse_cfg(sizes)?;
                c.scaling.protocols = protocols
                    .as_ref()
                    .map(|p| p.split(',').map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect());
                c.scaling.brent_max_size = *brent_max_size;
            }
            Command::Trotter {
                sizes,
                steps,
                shots,
                kinds,
                tomography,
                tomography_shots,
                qasm,
                ..
            } => {
                c.trotter.sizes = parse_cfg(sizes)?;
                c.trotter.steps = parse_cfg(steps)?;
                c.trotter.shots = *shots;
                c.trotter.kinds = parse_list(kinds)?;
                c.trotter.tomography = tomography.then_some(true);
                c.trotter.tomography_shots = *tomography_shots;
                c.trotter.qasm = qasm.then_some(true);
            }
            Command::ExportCircuit { steps, format, .. } => {
                c.export.steps = *steps;
                c.export.format = format.clone();
            }
        }
        Ok(c)
    }

    /// Config file (if any) overlaid with flags, defaults filled in.
    pub fn resolve_config(&self) -> Result<ExperimentConfig> {
        let base = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        Ok(base.overlay(&self.overrides()?).resolved())
    }
}

fn dispatch(cli: &Cli, cfg: &ExperimentConfig) -> Result<()> {
    if let Command::ExportCircuit { output, .. } = &cli.command {
        if let Some(text) = commands::cmd_export_circuit(cfg, output.as_deref())? {
            print!("{text}");
        }
        return Ok(());
    }
    let out = OutDir::create(cfg.out.as_deref().expect("resolved"))?;
    match &cli.command {
        Command::Run { .. } => commands::cmd_run(cfg, &out),
        Command::ScanLambda { .. } => commands::cmd_scan_lambda(cfg, &out),
        Command::ScanHx { .. } => commands::cmd_scan_hx(cfg, &out),
        Command::Scaling { .. } => commands::cmd_scaling(cfg, &out),
        Command::Trotter { .. } => commands::cmd_trotter(cfg, &out),
        Command::ExportCircuit { .. } => unreachable!(),
    }
}

/// Runs a parsed command inside a pool sized by `jobs`.
pub fn execute(cli: &Cli) -> Result<()> {
    let cfg = cli.resolve_config()?;
    match cfg.jobs {
        Some(0) => Err(Error::Config("--jobs must be at least 1".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(e.to_string()))?;
            pool.install(|| dispatch(cli, &cfg))
        }
        None => dispatch(cli, &cfg),
    }
}

/// Exit status for an error: 2 for bad input, 1 for failures while running.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Usage(_) | Error::Parse(_) | Error::Range { .. } => 2,
        _ => 1,
    }
}

pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lcdrive {}: {e}", cli.command.name());
            ExitCode::from(exit_code(&e))
        }
    }
}
