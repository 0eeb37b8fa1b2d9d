use thiserror::Error;

use crate::bn::ValidationReport;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("state {state} out of range for variable {var} (cardinality {cardinality})")]
    InvalidState {
        var: usize,
        state: usize,
        cardinality: usize,
    },

    #[error("joint state space of {size} entries exceeds the size guard of {limit}")]
    SizeGuard { size: u128, limit: u64 },

    #[error("network failed validation:\n{0}")]
    Validation(ValidationReport),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("sample {index} has zero probability under the network (variable {var})")]
    UncodableSample { index: usize, var: usize },

    #[error("stream was produced for a different network")]
    WrongCodebook,

    #[error("corrupt stream: {0}")]
    CorruptStream(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
