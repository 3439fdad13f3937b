//! Error type shared by the whole crate.

use alloc::string::String;
use core::fmt;

/// Errors raised by configuration validation and by operations whose
/// preconditions are violated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A configuration struct does not satisfy its invariants.
    Config(String),
    /// An operation argument is out of range or inconsistent.
    Argument(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Config(msg) => write!(f, "invalid configuration: {msg}"),
            Error::Argument(msg) => write!(f, "invalid argument: {msg}"),
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
