use thiserror::Error;

use sfl_core::Error as CoreError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    /// 1 for bad input, 2 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Core(e) => match e {
                CoreError::NoConvergence { .. }
                | CoreError::MatrixTooLarge { .. }
                | CoreError::ZeroMultiplicity(_)
                | CoreError::NonFinite { .. }
                | CoreError::Disconnected => 2,
                _ => 1,
            },
        }
    }
}
