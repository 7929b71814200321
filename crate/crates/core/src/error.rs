use thiserror::Error;

/// Errors returned by the decoding toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix must have a positive number of rows and columns (got {rows}x{cols})")]
    EmptyMatrix { rows: usize, cols: usize },

    #[error("matrix is rank deficient: rank {rank} < {rows} rows")]
    RankDeficient { rank: usize, rows: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid error pattern: {0}")]
    InvalidPattern(String),

    #[error("field polynomial {poly:#x} is not primitive of degree {m}")]
    NotPrimitive { poly: u64, m: u32 },

    #[error("generator polynomial {poly:#x} does not divide x^{n} + 1")]
    NotCyclic { poly: u64, n: usize },

    #[error("invalid code parameters: {0}")]
    InvalidCode(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("code does not fit the decoder: {0}")]
    DoesNotFit(String),

    #[error("pruning refused: {0}")]
    PruningRefused(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
