use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the `dmw` crate.
#[derive(Debug, Error)]
pub enum DmwError {
    /// Two objects that must share a dimension (tuple order, matrix size) do not.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A parameter lies outside its admissible range.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A computation produced non-finite values or failed to make progress.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A metric measure space failed its construction checks.
    #[error("invalid metric measure space: {0}")]
    Construction(String),

    /// Random generation could not produce a valid object within its retry budget.
    #[error("generation failed: {0}")]
    Generation(String),

    /// A dataset file is missing, malformed, or inconsistent.
    #[error("{}: {message}", location(path, *line))]
    Ingestion { path: PathBuf, line: Option<usize>, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn location(path: &std::path::Path, line: Option<usize>) -> String {
    match line {
        Some(line) => format!("{}:{}", path.display(), line),
        None => path.display().to_string(),
    }
}

pub type Result<T, E = DmwError> = std::result::Result<T, E>;

pub(crate) fn param(msg: impl Into<String>) -> DmwError {
    DmwError::Parameter(msg.into())
}

pub(crate) fn dim(msg: impl Into<String>) -> DmwError {
    DmwError::Dimension(msg.into())
}
