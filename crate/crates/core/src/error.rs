use thiserror::Error;

/// Library-wide error type.
///
/// `Argument` covers domain violations (an `eps` outside `[0, 1/2]`, a
/// coordinate index past the block length, ...), `Capacity` covers requests
/// past an enumeration budget, and `Inconsistency` flags inputs that break a
/// mathematical contract (e.g. a weight distribution whose MacWilliams
/// transform is not integral).
#[derive(Debug, Error)]
pub enum Error {
    #[error("argument error: {0}")]
    Argument(String),
    #[error("capacity error: {0}")]
    Capacity(String),
    #[error("inconsistency: {0}")]
    Inconsistency(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn argument<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}

pub(crate) fn capacity<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Capacity(msg.into()))
}

pub(crate) fn inconsistency<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Inconsistency(msg.into()))
}

pub(crate) fn parse_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse(msg.into()))
}
