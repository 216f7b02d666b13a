//! `relent`: compute relative entropies, run sweeps and trials, check
//! Loewner representations.
//!
//! Exit codes: 0 pass, 1 input error, 2 internal disagreement,
//! 3 inconclusive counterexample search.

mod args;
mod commands;
mod io;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// Outcome of a command, mapped onto the process exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass = 0,
    Input = 1,
    Disagreement = 2,
    Inconclusive = 3,
}

#[derive(Debug)]
pub struct Failure {
    pub status: Status,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Self { status: Status::Input, message: message.into() }
    }
}

/// Library errors from validating inputs are input errors; the rest
/// (quadrature failure, internal checks) signal disagreement.
impl From<relent_core::Error> for Failure {
    fn from(e: relent_core::Error) -> Self {
        use relent_core::Error as E;
        let status = match e {
            E::Accuracy { .. } | E::Internal(_) => Status::Disagreement,
            _ => Status::Input,
        };
        Self { status, message: e.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Compute(a) => commands::compute(&cli, a),
        Command::Converge(a) => commands::converge(&cli, a),
        Command::Trials(a) => commands::trials(&cli, a),
        Command::Repcheck(a) => commands::repcheck(&cli, a),
    };
    match result {
        Ok(status) => ExitCode::from(status as u8),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.status as u8)
        }
    }
}
