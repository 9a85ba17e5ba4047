use alloc::string::String;

/// Errors raised by the clustering core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("data format error at row {row}, column {column}: {message}")]
    DataFormat {
        row: usize,
        column: usize,
        message: String,
    },

    #[error("numerical failure on focal set {focal}: {message}")]
    NumericalFailure { focal: String, message: String },

    #[error("every sweep cell failed")]
    SweepFailed,
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
