use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate multiplicity: m2 = l - m - 1 = {m2} (need m2 >= 1)")]
    DegenerateMultiplicity { m2: i64 },

    #[error("point not on focal variety: {0}")]
    NotOnFocalVariety(String),

    #[error("point off M+: {0}")]
    OffFocalSet(String),

    #[error("invalid normal: {0}")]
    InvalidNormal(String),

    #[error("sampling failed after {attempts} attempts: {reason}")]
    SamplingFailed { attempts: usize, reason: String },

    #[error("eigenvalue clustering failed: {0}")]
    Clustering(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
