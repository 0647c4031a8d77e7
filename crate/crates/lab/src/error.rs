use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),

    #[error("config: {0}")]
    Config(#[from] toml::de::Error),

    #[error("config is missing `{0}`")]
    MissingKey(&'static str),

    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] lempert_core::Error),

    #[error("{0}")]
    Io(#[from] std::io::Error),

    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),
}

impl LabError {
    /// Process exit status for this error. Bad input of any kind is a usage
    /// error.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Io(_) | LabError::Json(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
