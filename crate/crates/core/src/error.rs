use thiserror::Error;

/// Errors raised by the library. Failed structural checks and census results are
/// data, never errors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("degenerate simplex: vertices are affinely dependent")]
    DegenerateSimplex,
    #[error("need at least {needed} points, got {found}")]
    TooFewPoints { needed: usize, found: usize },
    #[error("input points are affinely dependent (no full-dimensional simplex exists)")]
    AffinelyDependent,
    #[error("points {first} and {second} have identical coordinates")]
    DuplicatePoint { first: usize, second: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("periodic replication insufficient: a cell's empty ball leaves the replicated window")]
    ReplicationInsufficient,
    #[error("input too large for this operation: limit {limit}, got {found}")]
    TooLarge { limit: usize, found: usize },
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
