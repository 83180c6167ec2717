//! Command-line driver: argument and config-file parsing, dispatch to the core
//! crate, and deterministic CSV/JSON reports.
//!
//! Exit codes: `0` success, `1` usage or configuration error, `2` an invariant
//! violated mid-run (the report is still written), `3` I/O failure.

mod args;
mod commands;
mod output;

use std::ffi::OsString;

use ergo_lab_core::LabError;
use thiserror::Error;

pub use args::{
    parse_args, resolve_threads, AverageArgs, Command, ExpsumArgs, ExpsumMode, MaximalArgs, MaximalMode, ReportArgs,
    RunConfig, SieveArgs, SignalKind, SpectralArgs, THREADS_ENV,
};
pub use commands::{run, Outcome};
pub use output::to_json;

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Clap(#[from] clap::Error),
    #[error("usage: {0}")]
    Usage(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error(transparent)]
    Lab(#[from] LabError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => EXIT_IO,
            _ => EXIT_USAGE,
        }
    }
}

/// Parses, runs and reports; returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match parse_args(argv) {
        Ok(c) => c,
        Err(CliError::Clap(e)) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    match run(&config) {
        Ok(outcome) => {
            if let Some(v) = &outcome.violation {
                eprintln!("invariant violation: {v}");
            }
            outcome.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
