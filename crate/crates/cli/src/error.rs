use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Invalid configuration or arguments.
    #[error("{0}")]
    Validation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Core(#[from] pseudosym::Error),

    /// Every integration of a run hit a singularity.
    #[error("every row failed with a singularity: {0}")]
    AllSingular(String),
}

impl CliError {
    /// Process exit code for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::AllSingular(_) => 3,
            _ => 1,
        }
    }
}
