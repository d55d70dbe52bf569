use std::io;
use thiserror::Error;

/// Errors produced by the mining and selection pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// The input could not be parsed or contained no usable data.
    #[error("input error: {0}")]
    Input(String),
    /// A parameter was out of range or malformed.
    #[error("parameter error: {0}")]
    Parameter(String),
    /// A referenced item, rule or measure does not exist.
    #[error("domain error: {0}")]
    Domain(String),
    /// An operation was invoked on a value that violates its precondition.
    #[error("precondition error: {0}")]
    Precondition(String),
    #[error("io error: {0}")]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
