use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("coefficient overflow in Laurent polynomial arithmetic")]
    Overflow,
    #[error("unsupported Coxeter type: {0}")]
    UnsupportedType(String),
    #[error("group order {order} exceeds capacity {capacity}")]
    Capacity { order: u64, capacity: u64 },
    #[error("invalid word `{0}`")]
    InvalidWord(String),
    #[error("invalid polynomial `{0}`")]
    InvalidPoly(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("cache error: {0}")]
    Cache(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
