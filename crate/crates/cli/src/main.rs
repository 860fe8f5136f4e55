//! `fqsieve`: command-line workbench over F_q[t] — irreducible tables, sieve
//! weights, correlation reports, quotient lifts, and prime-class search
//! certificates.
//!
//! Every run resolves its parameters through the chain flag > config file >
//! default, prints the resolved parameter echo at the head of its output,
//! and is deterministic given (config, seed) regardless of thread count.

mod cache;
mod cmd;
mod config;
mod output;

use clap::Parser;
use std::process::ExitCode;

fn main() -> ExitCode {
    // clap itself exits with status 2 on malformed invocations.
    let cli = config::Cli::parse();
    match cmd::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
