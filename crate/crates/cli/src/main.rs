//! `weyl`: verification suites and divergence sweeps from the command line.
//!
//! Exit codes: 0 when every check passes, 1 when one fails, 2 on a usage or
//! configuration error.

mod commands;
mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use commands::{cmd_sweep_divergence, cmd_verify_group, cmd_verify_harmonic, Report};
use config::RunConfig;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("output error: {0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] weyl_core::error::Error),
}

#[derive(Parser, Debug)]
#[command(name = "weyl", version, about = "Harmonic-analysis checks and counterexample sweeps on the affine, SIM(2) and affine Poincare groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Group laws, Haar invariance and modular functions.
    VerifyGroup(Flags),
    /// Representations, Plancherel, inversion, Wigner and Weyl identities.
    VerifyHarmonic(Flags),
    /// Truncated lower-bound sweep of the counterexample symbol.
    SweepDivergence(Flags),
}

#[derive(Args, Debug)]
struct Flags {
    /// affine, sim2 or paff (all groups when omitted, affine for sweeps).
    #[arg(long)]
    group: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    /// Lebesgue exponent of the symbol, p > 2.
    #[arg(long)]
    p: Option<String>,
    /// Half-width of the support box.
    #[arg(long = "L")]
    l: Option<String>,
    /// Inner cutoff of the divergent integral.
    #[arg(long = "R")]
    r: Option<String>,
    /// Axis counts, e.g. `rep=128,angular=64,b=64,a=32,angle=32`.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// CSV report path; the JSON-lines summary goes next to it as `.jsonl`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// `key = value` file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Replace every check tolerance.
    #[arg(long)]
    tolerance: Option<String>,
    /// Test function of the harmonic suite: bump or zero.
    #[arg(long)]
    function: Option<String>,
    /// Random triples for the group-law checks.
    #[arg(long)]
    trials: Option<String>,
    /// Decades of cutoffs in a sweep.
    #[arg(long)]
    decades: Option<String>,
    #[arg(long = "per-decade")]
    per_decade: Option<String>,
}

impl Flags {
    fn resolve(&self) -> Result<RunConfig, CliError> {
        let flags = [
            ("group", self.group.clone()),
            ("alpha", self.alpha.clone()),
            ("p", self.p.clone()),
            ("l", self.l.clone()),
            ("r", self.r.clone()),
            ("grid", self.grid.clone()),
            ("seed", self.seed.clone()),
            ("out", self.out.as_ref().map(|p| p.display().to_string())),
            ("tolerance", self.tolerance.clone()),
            ("function", self.function.clone()),
            ("trials", self.trials.clone()),
            ("decades", self.decades.clone()),
            ("per_decade", self.per_decade.clone()),
        ];
        RunConfig::resolve(self.config.as_deref(), &flags)
    }
}

fn write_report(report: &Report, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => {
            fs::write(path, &report.csv).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let json = path.with_extension("jsonl");
            fs::write(&json, &report.jsonl).map_err(|e| CliError::Io(format!("{}: {e}", json.display())))?;
        }
        None => print!("{}", report.csv),
    }
    Ok(())
}

type CommandFn = fn(&RunConfig) -> Result<Report, CliError>;

fn run(cli: Cli) -> Result<bool, CliError> {
    let (flags, cmd): (&Flags, CommandFn) = match &cli.command {
        Command::VerifyGroup(f) => (f, cmd_verify_group),
        Command::VerifyHarmonic(f) => (f, cmd_verify_harmonic),
        Command::SweepDivergence(f) => (f, cmd_sweep_divergence),
    };
    let cfg = flags.resolve()?;
    let report = cmd(&cfg)?;
    write_report(&report, cfg.out.as_deref())?;
    Ok(report.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("weyl: {e}");
            ExitCode::from(2)
        }
    }
}
