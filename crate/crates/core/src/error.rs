use thiserror::Error;

/// Errors raised by the refinement library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An index or curve parameter lies outside the valid domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// An argument violates an operation's precondition.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Two rasters that must share dimensions do not.
    #[error("dimension mismatch: expected {expected:?}, got {actual:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        actual: (usize, usize),
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
