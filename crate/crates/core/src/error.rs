use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across the linking toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{origin}:{line}: field `{field}`: {message}")]
    Record { origin: String, line: usize, field: String, message: String },

    #[error("duplicate {kind} `{id}`")]
    Duplicate { kind: &'static str, id: String },

    #[error("unknown {kind} `{id}`")]
    Unknown { kind: &'static str, id: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("query `{0}` has no resolvable gold items")]
    EmptyGold(String),

    #[error("missing predictions for {} sentence(s): {}", .0.len(), .0.join(", "))]
    MissingPredictions(Vec<String>),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn record(origin: impl Into<String>, line: usize, field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Record { origin: origin.into(), line, field: field.into(), message: message.into() }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::Invalid(message.into())
    }
}
