use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Operator dimension would exceed the configured cap.
    #[error("dimension {dim} exceeds capacity {max}")]
    Capacity { dim: usize, max: usize },
    /// Subsystem, mask or multi-index does not fit the operand.
    #[error("index error: {0}")]
    Index(String),
    /// Input violates a mathematical precondition (non-Hermitian, not a state, d < 2, ...).
    #[error("domain error: {0}")]
    Domain(String),
}

impl Error {
    pub(crate) fn index(msg: impl Into<String>) -> Self {
        Error::Index(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
