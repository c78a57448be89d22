use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Compute(#[from] snyder_core::Error),
    #[error("cannot write output: {0}")]
    Output(String),
}

impl CliError {
    /// 2 for malformed invocations and configs, 1 for failed computations.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Compute(err) if err.is_configuration() => 2,
            CliError::Compute(_) | CliError::Output(_) => 1,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Output(err.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
