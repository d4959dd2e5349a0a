mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;
use divscore::Error;

use args::Cli;

/// Failures that map onto distinct exit codes.
#[derive(Debug)]
pub enum Failure {
    Lib(Error),
    /// Outputs were written but some fit did not reach tolerance.
    NotConverged(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn exit_code(f: &Failure) -> u8 {
    match f {
        Failure::NotConverged(_) | Failure::Lib(Error::NonConvergence(_)) => 3,
        Failure::Lib(Error::Io { .. }) => 1,
        Failure::Lib(_) => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Lib(e) => eprintln!("error: {e}"),
                Failure::NotConverged(msg) => eprintln!("error: {msg}"),
            }
            ExitCode::from(exit_code(&f))
        }
    }
}
