use std::path::PathBuf;

use thiserror::Error;

/// Harness failures. Each class maps to its own process exit code.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{0}")]
    Usage(String),
    #[error("file not found: {}", .0.display())]
    MissingFile(PathBuf),
    #[error("malformed config {}: {msg}", .path.display())]
    Config { path: PathBuf, msg: String },
    #[error("invalid settings: {0}")]
    Invalid(#[from] dynopt_core::Error),
    #[error("checkpoint {}: {source}", .path.display())]
    Checkpoint {
        path: PathBuf,
        source: dynopt_core::Error,
    },
    #[error("report: {0}")]
    Report(String),
    #[error("{}: {source}", .path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("csv {}: {source}", .path.display())]
    Csv { path: PathBuf, source: csv::Error },
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Usage(_) => 2,
            HarnessError::MissingFile(_) => 3,
            HarnessError::Config { .. } | HarnessError::Invalid(_) => 4,
            HarnessError::Checkpoint { .. } => 5,
            HarnessError::Report(_) => 6,
            HarnessError::Io { .. } | HarnessError::Csv { .. } => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        let path = path.into();
        if source.kind() == std::io::ErrorKind::NotFound {
            HarnessError::MissingFile(path)
        } else {
            HarnessError::Io { path, source }
        }
    }
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;
