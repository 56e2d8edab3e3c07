use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter was outside its supported range or two inputs disagree in shape.
    #[error("invalid parameter: {0}")]
    Parameter(String),
    /// A configuration the evaluators deliberately do not support (e.g. S > 1 multicell).
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    /// A genome or state violated a structural invariant.
    #[error("invalid genome: {0}")]
    InvalidGenome(String),
    #[error("json: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
