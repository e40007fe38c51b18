//! `hew`: fit, compare and simulate the Harris extended Weibull distribution.
//!
//! Exit codes: 0 success, 2 input error, 3 estimation failure, 4 internal
//! invariant violation.

mod args;
mod commands;
mod document;
mod error;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use error::{CliError, CliResult};

fn run(cli: Cli) -> CliResult<()> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(CliError::Input("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Internal(e.to_string()))?;
    }
    match &cli.command {
        Command::Fit(a) => commands::fit(a),
        Command::Compare(a) => commands::compare(a),
        Command::Bayes(a) => commands::bayes(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Sample(a) => commands::sample(a),
        Command::Grid(a) => commands::grid(a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
