//! `greenprop` command-line harness.
//!
//! Exit codes: 0 success (or check passed), 1 check failed, 2 invalid input,
//! 3 runtime failure.

mod commands;
mod manifest;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{DecayReportArgs, LatticeInfoArgs, Lemma22Args, OracleCompareArgs, SimulateArgs, SymbolCheckArgs};

/// Exact Green's-function propagator and decay experiments for the
/// linearized compressible Navier–Stokes system.
#[derive(Debug, Parser)]
#[command(name = "greenprop", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print lattice geometry and resolution limits.
    LatticeInfo(LatticeInfoArgs),
    /// Compare the closed-form symbol with the matrix-exponential oracle.
    SymbolCheck(SymbolCheckArgs),
    /// Fit the decay rate of one propagator part.
    Lemma22(Lemma22Args),
    /// Run a configured nonlinear or linear simulation.
    Simulate(SimulateArgs),
    /// Rebuild the decay report of a finished run directory.
    DecayReport(DecayReportArgs),
    /// Print symbol and oracle at one `(t, ξ)`.
    OracleCompare(OracleCompareArgs),
}

/// Outcome of a subcommand that ran to completion.
pub enum Outcome {
    Done,
    Pass,
    Fail,
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("GREENPROP_THREADS") {
        let n: usize =
            v.trim().parse().map_err(|_| anyhow::anyhow!("GREENPROP_THREADS must be a positive integer, got `{v}`"))?;
        if n == 0 {
            anyhow::bail!("GREENPROP_THREADS must be positive");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<greenprop::Error>() {
        Some(
            greenprop::Error::Config(_)
            | greenprop::Error::Domain(_)
            | greenprop::Error::Shape { .. }
            | greenprop::Error::UnsupportedOrder(_)
            | greenprop::Error::Toml(_),
        ) => 2,
        Some(_) => 3,
        None if err.downcast_ref::<std::num::ParseFloatError>().is_some() => 2,
        None => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|_| match cli.command {
        Command::LatticeInfo(a) => commands::lattice_info(a),
        Command::SymbolCheck(a) => commands::symbol_check(a),
        Command::Lemma22(a) => commands::lemma22(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::DecayReport(a) => commands::decay_report(a),
        Command::OracleCompare(a) => commands::oracle_compare(a),
    });
    match result {
        Ok(Outcome::Done | Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
