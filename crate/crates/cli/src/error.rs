use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] blockade_core::Error),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 1 for invalid input, 2 for capacity limits, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        use blockade_core::Error as E;
        match self {
            CliError::Core(E::Capacity { .. }) => 2,
            CliError::Core(E::Numerical(_)) | CliError::Core(E::NoRevival { .. }) => 3,
            _ => 1,
        }
    }
}
