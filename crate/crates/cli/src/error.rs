//! Command failures and their exit codes.

use std::fmt;
use std::path::Path;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, configuration or argument combinations (exit 1).
    Invalid(String),
    /// Input files that are missing or cannot be parsed (exit 2).
    Unreadable(String),
    /// Error detection discarded every shot (exit 3).
    NoAccepted(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Unreadable(_) => 2,
            CliError::NoAccepted(_) => 3,
        }
    }

    pub fn unreadable(path: &Path, err: impl fmt::Display) -> Self {
        CliError::Unreadable(format!("{}: {err}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invalid(m) => write!(f, "invalid configuration: {m}"),
            CliError::Unreadable(m) => write!(f, "unreadable input: {m}"),
            CliError::NoAccepted(m) => write!(f, "no accepted shots: {m}"),
        }
    }
}

impl From<qpexas::Error> for CliError {
    fn from(e: qpexas::Error) -> Self {
        CliError::Invalid(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
