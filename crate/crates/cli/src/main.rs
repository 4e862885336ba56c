mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use pfd_core::analytic::EvaluationMode;

/// Input problems exit with 2, failures while computing or writing with 1.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Approx,
}

impl From<Mode> for EvaluationMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Exact => EvaluationMode::Exact,
            Mode::Approx => EvaluationMode::Approximate,
        }
    }
}

/// Availability and PFD of M-out-of-N safety systems under partial and full
/// proof tests.
#[derive(Debug, Parser)]
#[command(name = "pfd", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value = "exact")]
    mode: Mode,

    /// Write the report (or CSV) here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Curve grid spacing in hours (default: 1% of the full test interval).
    #[arg(long, global = true)]
    step: Option<f64>,

    /// Monte Carlo trials (overrides the config).
    #[arg(long, global = true)]
    trials: Option<u64>,

    /// Monte Carlo master seed (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Confidence level of the failure-rate interval.
    #[arg(long, global = true, default_value_t = commands::DEFAULT_LEVEL)]
    level: f64,

    /// Print the validated configuration as JSON and exit.
    #[arg(long, global = true)]
    dump_config: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// PFD_avg, per-interval PFD, U_max and SIL band.
    Assess,
    /// Availability curve as CSV.
    Curve,
    /// Failure rate and partial-test efficiency from test counts.
    Estimate,
    /// Place the partial tests to minimise PFD_avg.
    Optimize,
    /// Monte Carlo PFD_avg next to the analytic value.
    Simulate,
}

fn run(cli: &Cli) -> Result<String, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Input("--config <path> is required".into()))?;
    let doc = config::load(path)?;
    doc.validate()?;
    if cli.dump_config {
        return Ok(config::dump(&doc));
    }
    let mode = cli.mode.into();
    match cli.command {
        Command::Assess => commands::assess(&doc, mode),
        Command::Curve => commands::curve(&doc, mode, cli.step),
        Command::Estimate => commands::estimate_report(&doc, cli.level),
        Command::Optimize => commands::optimize_report(&doc),
        Command::Simulate => commands::simulate_report(&doc, mode, cli.trials, cli.seed),
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli).and_then(|text| emit(&text, cli.out.as_ref())) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
