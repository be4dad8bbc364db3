use std::path::PathBuf;

use thiserror::Error;

/// Failures of the file and command-line layer.
#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: malformed JSON: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    /// The file parsed but does not describe a valid object.
    #[error("{path}: {source}")]
    Content {
        path: PathBuf,
        #[source]
        source: pharmink_core::Error,
    },
}

pub type Result<T, E = IoError> = std::result::Result<T, E>;

pub(crate) fn io_err(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::Io {
        path: path.to_path_buf(),
        source,
    }
}
