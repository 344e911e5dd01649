use thiserror::Error;

/// Errors raised by the library's calculators and constructors.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("objects are defined over different ground sets")]
    GroundMismatch,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("operation requires binary hypotheses: {0}")]
    NonBinary(&'static str),

    #[error("unsupported hypothesis class: {0}")]
    UnsupportedClass(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("empty {0}")]
    Empty(&'static str),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("exact enumeration refused for m = {m} (limit {limit})")]
    TooLarge { m: usize, limit: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
