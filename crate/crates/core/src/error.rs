use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TraceError {
    /// An argument violates a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// Two independent computations that must agree did not.
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
    /// Fixed-width arithmetic overflowed.
    #[error("arithmetic overflow")]
    Overflow,
    /// Reading or writing the class-number cache failed.
    #[error("cache file error: {0}")]
    Cache(String),
}

pub type Result<T> = std::result::Result<T, TraceError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(TraceError::InvalidInput(msg.into()))
}

pub(crate) fn check_positive(name: &str, value: u64) -> Result<()> {
    if value == 0 {
        return invalid(format!("{name} must be positive"));
    }
    Ok(())
}
