//! Command-line harness for the dyadic Riesz toolkit.
//!
//! Exit status: 0 success, 1 internal error, 2 usage error, 3 golden mismatch.

mod cli;
mod commands;
mod config;
mod failure;
mod golden;
mod output;

use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let args = cli::Cli::parse();
    let result = config::Context::new(&args.global).and_then(|ctx| commands::run(args.command, &ctx));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            failure::exit_code(&err)
        }
    }
}
