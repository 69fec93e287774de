//! `cdm`: material-point damage-plasticity experiments from TOML configs.
//!
//! Subcommands: `simulate` (one load-path run to CSV + JSON summary),
//! `fracture-surface` (grid of proportional runs to a damage threshold),
//! `optimize` (constrained load-path optimization), `rotate` (proportional
//! versus rotating-eigenvector comparison at fixed stress invariants).
//! Exit codes: 0 success, 2 configuration error, 3 simulation failure.

mod commands;
mod config;
mod output;

use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or arguments; exit code 2, nothing written.
    Config(String),
    /// The simulation (or an output write) failed; exit code 3.
    Sim(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Sim(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Sim(m) => write!(f, "simulation failure: {m}"),
        }
    }
}

#[derive(Parser)]
#[command(name = "cdm", version, about = "Material-point damage-plasticity experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one load path; writes run.csv and summary.json.
    Simulate(CommonArgs),
    /// Sweep a (triaxiality, Lode angle) grid; writes surface.csv.
    FractureSurface(CommonArgs),
    /// Optimize a tension-torsion path; writes report.json and traces.csv.
    Optimize(CommonArgs),
    /// Compare proportional and rotated paths; writes report.json and rotate.csv.
    Rotate(CommonArgs),
}

#[derive(Args)]
pub struct CommonArgs {
    /// Experiment configuration (TOML).
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,
    /// Random seed override (optimizer).
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
    /// Configuration override, dotted path = TOML value; repeatable.
    #[arg(long = "set", value_name = "K=V")]
    set: Vec<String>,
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Simulate(a) => commands::simulate(a),
        Cmd::FractureSurface(a) => commands::fracture_surface(a),
        Cmd::Optimize(a) => commands::optimize(a),
        Cmd::Rotate(a) => commands::rotate(a),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.code());
    }
}
