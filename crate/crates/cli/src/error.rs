use std::path::PathBuf;

use nmf_merge::pipeline::PipelineError;
use nmf_merge::NmfError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("negative entry {value} at row {row}, column {col}")]
    Negative { row: usize, col: usize, value: f64 },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Nmf(#[from] NmfError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub(crate) fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
    let path = path.into();
    move |source| CliError::Io { path, source }
}
