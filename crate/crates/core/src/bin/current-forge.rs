use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use current_forge::report::{emit_report, Format};
use current_forge::schema::RunConfig;
use current_forge::suite::run_suite;
use current_forge::Error;

/// Verify conserved currents of the Dirac, Klein-Gordon, Pauli and
/// Schrödinger equations and certify uniqueness numerically.
///
/// Exit codes: 0 all cases pass, 1 some case fails, 2 configuration error,
/// 3 internal error, 4 I/O error.
#[derive(Debug, Parser)]
#[command(name = "current-forge", version)]
struct Cli {
    /// clifford | fierz | conserve | gordon | charge | stress | pauli |
    /// schrodinger | uniqueness-dirac | uniqueness-kg | all
    #[arg(long)]
    suite: Option<String>,
    /// JSON run configuration; flags override its values.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Seed (falls back to CURRENT_FORGE_SEED, then 42).
    #[arg(long)]
    seed: Option<u64>,
    /// Write the JSON report here ("-" for standard output).
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Periodic-box quadrature points per axis.
    #[arg(long)]
    grid: Option<usize>,
    /// Replace every upper-bound tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Fixed number of modes for generated fields.
    #[arg(long)]
    modes: Option<usize>,
    /// Points per conservation sweep.
    #[arg(long)]
    points: Option<usize>,
}

enum Failure {
    Config(String),
    Internal(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Internal(_) => 3,
            Failure::Io(_) => 4,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_)
            | Error::InvalidConstants(_)
            | Error::AliasedQuadrature { .. }
            | Error::OffLattice
            | Error::UnsupportedDegree(_)
            | Error::UnsupportedPauliConfiguration
            | Error::IncompatibleCurrent { .. } => Failure::Config(e.to_string()),
            Error::Io(_) => Failure::Io(e.to_string()),
            _ => Failure::Internal(e.to_string()),
        }
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
            RunConfig::from_json(&text).map_err(|e| Failure::Config(e.to_string()))?
        }
        None => RunConfig::default(),
    };
    if let Some(s) = &cli.suite {
        cfg.suite = s.clone();
    }
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    if let Some(g) = cli.grid {
        cfg.grid_n = g;
    }
    if cli.tol.is_some() {
        cfg.tolerance = cli.tol;
    }
    if cli.modes.is_some() {
        cfg.modes = cli.modes;
    }
    if let Some(p) = cli.points {
        cfg.points = p;
    }
    if let Some(j) = &cli.json {
        cfg.output = Some(j.display().to_string());
    }
    cfg.validate().map_err(|e| Failure::Config(e.to_string()))?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<bool, Failure> {
    let cfg = load_config(cli)?;
    let report = run_suite(&cfg)?;
    match cfg.output.as_deref() {
        Some("-") => emit_report(&report, Format::Json, None)?,
        Some(path) => {
            emit_report(&report, Format::Json, Some(path.as_ref())).map_err(|e| Failure::Io(format!("{path}: {e}")))?;
            emit_report(&report, Format::Text, None)?;
        }
        None => emit_report(&report, Format::Text, None)?,
    }
    Ok(report.all_pass())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            let (Failure::Config(m) | Failure::Internal(m) | Failure::Io(m)) = &f;
            eprintln!("current-forge: {m}");
            ExitCode::from(f.code())
        }
    }
}
