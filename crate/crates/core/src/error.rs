//! Crate-wide error type.

use std::path::PathBuf;
use std::time::Duration;

/// Errors produced by any pipeline module.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at {source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("lookup error: {0}")]
    Lookup(String),

    #[error("ambiguous entity match for {label:?}: candidates {candidates:?}")]
    AmbiguousEntity {
        label: String,
        candidates: Vec<String>,
    },

    #[error("integrity error: {0}")]
    Integrity(String),

    #[error("backend error: {0}")]
    Backend(String),

    #[error("backend timeout after {0:?}")]
    Timeout(Duration),

    #[error("scoring error: {0}")]
    Scoring(String),

    #[error("config error in field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("request error: {0}")]
    Request(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(source_name: impl Into<String>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            source_name: source_name.into(),
            line,
            message: message.into(),
        }
    }

    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
