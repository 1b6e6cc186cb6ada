use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the toolkit.
///
/// Variants are grouped by what a caller can do about them: bad input
/// (fix the arguments), data problems (fix the files), numerical failures
/// (change parameters or data) and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dataset error: {0}")]
    Dataset(String),

    #[error("cannot decode image {path}: {message}")]
    Decode { path: PathBuf, message: String },

    #[error("{source_name}:{line}: {message}")]
    Format {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("mismatch: {0}")]
    Mismatch(String),

    #[error("leakage guard: {0}")]
    Leakage(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("FastICA did not converge after {iterations} iterations (last change {last_change:.3e})")]
    IcaNotConverged { iterations: usize, last_change: f64 },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(source_name: &str, line: usize, message: impl Into<String>) -> Self {
        Error::Format {
            source_name: source_name.to_string(),
            line,
            message: message.into(),
        }
    }

    /// True for failures of an iterative or numerical routine rather than
    /// bad input or data.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerical(_) | Error::IcaNotConverged { .. })
    }

    /// True for caller mistakes (bad parameters) as opposed to bad data.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::InvalidInput(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
