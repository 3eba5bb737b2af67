use std::fmt;

/// Command failure, mapped onto the process exit status.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad flags, unreadable or malformed files, invalid parameters: exit 1.
    Input(String),
    /// A solver ran out of iterations: exit 2.
    NotConverged(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::NotConverged(_) => 2,
        }
    }

    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "error: {m}"),
            CliError::NotConverged(m) => write!(f, "not converged: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<nitrq_core::Error> for CliError {
    fn from(e: nitrq_core::Error) -> Self {
        match e {
            nitrq_core::Error::RootNotConverged(_) => CliError::NotConverged(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
