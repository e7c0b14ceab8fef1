//! `spikelab` command line: limit-law evaluation, exact combinatorics and
//! seeded Monte Carlo runs. JSON goes to stdout, data files to `--out`.
//!
//! Exit codes: 0 success, 1 runtime or numeric failure, 2 usage error.

mod comb;
mod limits;
mod simulate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "spikelab", version, about = "Spiked heavy-tailed Wigner matrices")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Master seed; overrides the one in --config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for Monte Carlo runs. Output does not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output directory for data files.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Experiment config, or a manifest written by an earlier run.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Limit laws, BBP map, G1/G2 and variational suprema.
    Limits(limits::LimitsArgs),
    /// Exact Catalan convolutions, cycle tables and generating sums.
    Comb(comb::CombArgs),
    /// One experiment: CSV of trials, per-n summaries and a manifest.
    Simulate(simulate::SimArgs),
    /// Like simulate, plus a KS-versus-n table; needs at least two values of n.
    Sweep(simulate::SimArgs),
}

/// Failure of a subcommand after argument parsing.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl From<spikelab::Error> for CliError {
    fn from(e: spikelab::Error) -> Self {
        match e {
            spikelab::Error::InvalidParameter(m) => CliError::Usage(m),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn print_json(value: &serde_json::Value) -> CliResult<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Limits(a) => limits::run(a),
        Command::Comb(a) => comb::run(a),
        Command::Simulate(a) => simulate::run(a, &cli.global, false),
        Command::Sweep(a) => simulate::run(a, &cli.global, true),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
