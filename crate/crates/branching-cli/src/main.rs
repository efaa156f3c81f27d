//! `branching`: counting tables, graph exports, chain tables and walk experiments.

mod args;
mod chain;
mod count;
mod graph;
mod output;
mod simulate;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use output::CliError;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            return CliError::Config(first.trim_start_matches("error: ").to_string()).report();
        }
    };
    let result = match &cli.command {
        Command::Count(a) => count::run(a, &cli),
        Command::Graph(a) => graph::run(a, &cli),
        Command::Chain(a) => chain::run(a, &cli),
        Command::Simulate(a) => simulate::run(a, &cli),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => e.report(),
    }
}
