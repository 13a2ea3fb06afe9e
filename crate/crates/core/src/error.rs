use thiserror::Error;

/// Errors raised by the library. Every variant maps to exit code 2 in the CLI.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("arity mismatch: {0}")]
    Arity(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("size guard exceeded: {0}")]
    Guard(String),
    #[error("{line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
