use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("empty input: {0}")]
    Empty(String),

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("node count mismatch: expected {expected}, found {found}")]
    NodeCountMismatch { expected: usize, found: usize },

    #[error("missing id {0}")]
    MissingId(usize),

    #[error("row {row}: duplicate id {id}")]
    DuplicateId { row: usize, id: usize },

    #[error("row {row}: expected {expected} values, found {found}")]
    RowLength {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("rewiring failed: {0}")]
    Rewire(String),

    #[error("only {available} non-adjacent pairs exist, {needed} requested")]
    NotEnoughNonEdges { needed: usize, available: usize },

    #[error("numerical non-convergence: {0}")]
    NonConvergence(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
