use std::process::ExitCode;

use clap::Parser;
use pinch_cli::args::Cli;
use pinch_cli::{exit_code, run, Status, EXIT_USAGE};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = run(&cli);
    match &result {
        Ok(Status::Success) => {}
        Ok(Status::Failed(msg)) => eprintln!("error: {msg}"),
        Err(e) => eprintln!("error: {e:#}"),
    }
    exit_code(&result)
}
