use thiserror::Error;

/// Errors raised by the numerical layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input violated a documented precondition (ranges, grid sizes, shapes).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A value fell outside the domain where an operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two operands live on different grids.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// NaN/Inf appeared, a linear solve failed, or a positivity guard tripped.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// The run was cancelled from outside before it finished.
    #[error("cancelled")]
    Cancelled,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

pub(crate) fn numerical(msg: impl Into<String>) -> Error {
    Error::Numerical(msg.into())
}
