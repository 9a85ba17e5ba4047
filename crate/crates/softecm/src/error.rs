use std::path::PathBuf;

/// Errors raised by file handling and the command-line front end.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] softecm_core::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Parse {
        path: PathBuf,
        source: softecm_core::Error,
    },

    #[error("{0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, source: softecm_core::Error) -> Self {
        Error::Parse {
            path: path.into(),
            source,
        }
    }
}

/// Data-format error at a 1-based row and column.
pub(crate) fn format_error(
    row: usize,
    column: usize,
    message: impl Into<String>,
) -> softecm_core::Error {
    softecm_core::Error::DataFormat {
        row,
        column,
        message: message.into(),
    }
}
