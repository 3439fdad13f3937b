//! Benchmark harness, file formats and configuration plumbing behind the
//! `tdoa` command-line tool.

pub mod config;
pub mod csv;
pub mod harness;
pub mod io;

use std::fmt;

/// Command-level errors, split by the exit code they map to: configuration
/// and usage problems exit with 2, runtime and I/O failures with 1.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 1,
        }
    }

    pub fn io(context: impl fmt::Display, err: impl fmt::Display) -> Self {
        CliError::Io(format!("{context}: {err}"))
    }
}

impl From<tdoa_core::Error> for CliError {
    fn from(err: tdoa_core::Error) -> Self {
        CliError::Config(err.to_string())
    }
}
