use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Dmw(#[from] dmw::DmwError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

impl ExperimentError {
    /// Short machine-readable category.
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Config(_) => "config",
            Self::Dmw(_) => "computation",
            Self::Io(_) => "io",
            Self::Csv(_) | Self::Json(_) => "output",
            Self::ThreadPool(_) => "threads",
        }
    }
}

pub type Result<T, E = ExperimentError> = std::result::Result<T, E>;
