use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input length: {what} is {got}, expected {expected}")]
    Length {
        what: &'static str,
        got: usize,
        expected: String,
    },

    #[error("invalid code configuration: {0}")]
    CodeConfig(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("invalid simulation config: {0}")]
    Config(String),

    // The cause is part of the message rather than a chained source, so
    // callers that print the whole chain do not repeat it.
    #[error("failed to parse {path}: {cause}")]
    Parse { path: PathBuf, cause: serde_json::Error },

    #[error("I/O error on {path}: {cause}")]
    Io { path: PathBuf, cause: std::io::Error },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn length(what: &'static str, got: usize, expected: impl ToString) -> Self {
        Error::Length {
            what,
            got,
            expected: expected.to_string(),
        }
    }
}
