use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum NeelError {
    #[error("argument outside domain: {0}")]
    Domain(String),
    #[error("requested accuracy not reached: {message} (best estimate {estimate}, error {error})")]
    Accuracy { message: String, estimate: f64, error: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("walls {first} and {second} coincide; energy tends to {limit}")]
    Coincident { first: usize, second: usize, limit: f64 },
    #[error("io: {0}")]
    Io(String),
    #[error("parse: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, NeelError>;

impl From<std::io::Error> for NeelError {
    fn from(e: std::io::Error) -> Self {
        NeelError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for NeelError {
    fn from(e: serde_json::Error) -> Self {
        NeelError::Parse(e.to_string())
    }
}
