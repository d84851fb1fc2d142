//! Command-line front end: threshold table reproduction, curve sampling, single
//! integrals and the validation suites, with CSV/JSON export.

pub mod args;
pub mod check;
pub mod curve;
pub mod integral;
pub mod output;
pub mod table1;

use std::process::ExitCode;

use args::{Cli, Command};

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_FAILURE: u8 = 3;

/// Result of a subcommand that ran to completion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Success,
    /// Output was written but part of the computation failed.
    Failed(String),
}

pub fn run(cli: &Cli) -> anyhow::Result<Status> {
    match &cli.command {
        Command::Table1(a) => table1::run(a),
        Command::Curve(a) => curve::run(a),
        Command::Integral(a) => integral::run(a),
        Command::Check(a) => check::run(a),
    }
}

pub fn exit_code(result: &anyhow::Result<Status>) -> ExitCode {
    match result {
        Ok(Status::Success) => ExitCode::SUCCESS,
        Ok(Status::Failed(_)) | Err(_) => ExitCode::from(EXIT_FAILURE),
    }
}
