use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input outside the documented domain of an operation.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// A cross-check between two independent computations failed.
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    /// An iterative solver stopped before reaching its tolerance.
    #[error("no convergence: {0}")]
    NoConvergence(String),
    /// Parameters are accepted by the formulas but do not define a central chain.
    #[error("not central: {0}")]
    NotCentral(String),
    /// An invariant that holds for every valid input was violated.
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
