//! Command-line harness around the `blockkrylov` solver.
//!
//! `solve` runs seeded Poisson problems (or a Matrix Market file) and emits
//! one CSV [`RunRecord`] per batch of right-hand sides, `model` evaluates the
//! analytic kernel runtime model over a list of block widths, and `verify`
//! runs the built-in invariant suites. CSV goes to stdout, diagnostics to
//! stderr.

use std::ffi::OsString;
use std::io::{self, Write};

use clap::error::ErrorKind;
use clap::Parser;

mod args;
pub mod exit;
pub mod model;
pub mod record;
pub mod solve;
pub mod verify;

pub use args::{Cli, Command, ModelArgs, SolveArgs, VerifyArgs};
pub use record::{ModelRecord, RunRecord};

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => exit::SUCCESS,
                _ => exit::USAGE,
            };
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let result = match cli.command {
        Command::Solve(a) => solve::run(&a, &mut out),
        Command::Model(a) => model::run(&a, &mut out),
        Command::Verify(a) => verify::run(&a, &mut out),
    };
    let _ = out.flush();
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

/// A failure that ends the command with a specific exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: exit::USAGE,
            message: message.into(),
        }
    }

    pub fn with_code(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<blockkrylov::Error> for Failure {
    fn from(e: blockkrylov::Error) -> Self {
        use blockkrylov::Error as E;
        let code = match &e {
            E::Config(_) | E::Dimension(_) => exit::USAGE,
            E::Parse { .. } | E::NotSymmetric { .. } | E::Factorization { .. } => exit::DATA,
            E::Io(_) => exit::NO_INPUT,
            E::Breakdown { .. } | E::Size { .. } => exit::SOFTWARE,
        };
        Self::with_code(code, e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Self::with_code(exit::IO, format!("writing CSV: {e}"))
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Self::with_code(exit::IO, e.to_string())
    }
}

pub type CmdResult = Result<u8, Failure>;

impl Failure {
    fn prefixed(mut self, prefix: &str) -> Self {
        self.message.insert_str(0, prefix);
        self
    }
}
