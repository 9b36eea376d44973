//! Command-line front end for the all-pay conflict-bargaining solvers.
//!
//! Four subcommands: `bribing` and `requesting` emit the certificate reports
//! and offer curves for their models, `auction` solves a continuation BNE
//! directly, and `verify` runs the invariant suite against a scenario.
//! Reports are JSON with sorted keys, curves are CSV; with `--reproducible`
//! every output is byte-identical across runs.
//!
//! Exit codes: 0 success, 1 invariant violations from `verify`, 2 scenario
//! or argument errors, 3 numeric solver failures.

mod commands;
mod report;
mod scenario;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "allpay", version, about = "Equilibrium reports for all-pay auctions with pre-play bribes or requests")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Scenario file (JSON with distribution literals for f1 and f2).
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory for reports and curves.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Grid size for exported curves and oracle scans.
    #[arg(long, default_value_t = 200)]
    grid_n: usize,
    /// Residual tolerance for knife-edge equalities and invariant checks.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Omit volatile metadata so outputs are byte-identical across runs.
    #[arg(long)]
    reproducible: bool,
}

#[derive(Args)]
struct AuctionArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Solve the one-sided auction with this known type instead of the
    /// two-sided game between f1 and f2.
    #[arg(long)]
    point_mass: Option<f64>,
    /// Which player the point mass belongs to (1 or 2).
    #[arg(long, default_value_t = 1)]
    known_side: u8,
    /// Cross-check the solution against the fictitious-play oracle and
    /// append agreement metrics to the summary.
    #[arg(long)]
    verify: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Implementability and security reports for the bribing model.
    Bribing(CommonArgs),
    /// Existence and security reports for the requesting model.
    Requesting(CommonArgs),
    /// Solve a continuation auction and export its bid curves.
    Auction(AuctionArgs),
    /// Run the invariant suite against a scenario.
    Verify(CommonArgs),
}

/// Failures mapped onto process exit codes.
pub(crate) enum CliError {
    /// Unreadable or malformed input (exit 2).
    Input(String),
    /// A solver failed to converge or hit an invariant (exit 3).
    Numeric(String),
}

impl From<allpay_core::Error> for CliError {
    fn from(e: allpay_core::Error) -> Self {
        CliError::Numeric(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(format!("io error: {e}"))
    }
}

pub fn run() -> u8 {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Bribing(args) => commands::cmd_bribing(args),
        Command::Requesting(args) => commands::cmd_requesting(args),
        Command::Auction(args) => commands::cmd_auction(args),
        Command::Verify(args) => commands::cmd_verify(args),
    };
    match outcome {
        Ok(code) => code,
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(CliError::Numeric(msg)) => {
            eprintln!("numeric failure: {msg}");
            3
        }
    }
}
