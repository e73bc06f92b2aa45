use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape mismatch: expected {expected}x{expected}, got {rows}x{cols}")]
    Shape {
        expected: usize,
        rows: usize,
        cols: usize,
    },

    #[error("coefficient families live on different duals ({left} vs {right})")]
    DualMismatch { left: String, right: String },

    #[error("unknown irrep label `{0}`")]
    UnknownLabel(String),

    #[error("family has no entry for irrep `{0}`")]
    MissingEntry(String),

    #[error("index ({0}, {1}) out of range for an irrep of dimension {2}")]
    IndexOutOfRange(usize, usize, usize),

    #[error("matrix is not unitary (defect {0:e})")]
    NotUnitary(f64),

    #[error("matrix is not a contraction (operator norm {0})")]
    NotContraction(f64),

    #[error("dual `{0}` is not attached to a classical group")]
    NonClassical(String),

    #[error("invalid dual: {0}")]
    InvalidDual(String),

    #[error("invalid group table: {0}")]
    InvalidGroup(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("contract violated: {0}")]
    Contract(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
