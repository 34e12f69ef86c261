use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid ring: {0}")]
    InvalidRing(String),

    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(String, String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid module: {0}")]
    InvalidModule(String),

    /// An object failed one of its structural invariants.
    #[error("{object}: {invariant}")]
    Validation { object: String, invariant: String },

    #[error("morphisms are not composable: {0}")]
    NotComposable(String),

    #[error("morphisms do not share a source: {0}")]
    SourceMismatch(String),

    #[error("precondition failed: {0}")]
    Precondition(String),
}

impl Error {
    pub fn validation(object: impl Into<String>, invariant: impl Into<String>) -> Self {
        Error::Validation {
            object: object.into(),
            invariant: invariant.into(),
        }
    }
}
