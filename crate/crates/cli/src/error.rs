use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] ltv_core::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Usage(String),
    #[error("cannot start worker pool: {0}")]
    ThreadPool(#[from] rayon::ThreadPoolBuildError),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    /// 2 for bad input, 3 when the exact evaluator's size guard trips, 4 for
    /// internal failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(ltv_core::Error::Capacity { .. }) => 3,
            CliError::Core(ltv_core::Error::Invariant(_)) | CliError::ThreadPool(_) => 4,
            _ => 2,
        }
    }
}
