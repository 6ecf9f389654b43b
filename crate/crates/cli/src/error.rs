use budgeted_contracts::ContractError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Contract(#[from] ContractError),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    Verify(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn io(path: impl std::fmt::Display, err: impl std::fmt::Display) -> Self {
        CliError::Io { path: path.to_string(), message: err.to_string() }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Contract(e) => e.kind(),
            CliError::Usage(_) => "usage",
            CliError::Io { .. } => "io",
            CliError::Verify(_) => "verify",
        }
    }

    /// 2 for invalid inputs and violated preconditions, 1 for I/O and verification failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Contract(_) | CliError::Usage(_) => 2,
            CliError::Io { .. } | CliError::Verify(_) => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
