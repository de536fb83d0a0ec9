mod args;
mod commands;
mod report;

use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use crate::args::Cli;

/// Process exit statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Ok = 0,
    Usage = 1,
    Input = 2,
    ResourceLimit = 3,
    Solver = 4,
    /// Some cells or sweep points failed, the rest were computed.
    Partial = 5,
}

impl Status {
    pub fn of(err: &pmprivacy::Error) -> Status {
        use pmprivacy::Error::*;
        match err {
            Config(_) | KTooLarge { .. } => Status::Usage,
            Input(_) | Domain(_) | Io(_) | NoCandidates { .. } => Status::Input,
            ResourceLimit { .. } => Status::ResourceLimit,
            Unbalanced(_) | Solver(_) => Status::Solver,
        }
    }
}

/// A failure that ends the command before a report can be produced.
#[derive(Debug)]
pub struct Failure {
    pub status: Status,
    pub message: String,
}

impl From<pmprivacy::Error> for Failure {
    fn from(err: pmprivacy::Error) -> Self {
        Failure {
            status: Status::of(&err),
            message: err.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(Status::Usage as u8),
            };
        }
    };
    match commands::run(&cli.command) {
        Ok(report) => {
            let text = match cli.output {
                args::Output::Json => report.to_json(),
                args::Output::Table => report.to_table(),
            };
            let mut stdout = std::io::stdout().lock();
            let _ = writeln!(stdout, "{text}");
            ExitCode::from(report.status as u8)
        }
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.status as u8)
        }
    }
}
