use thiserror::Error;

/// Failures mapped onto the process exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("refused: {0}")]
    Refused(String),
    #[error("verification failed: {}", .0.join(", "))]
    VerificationFailed(Vec<String>),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Refused(_) => 2,
            CliError::VerificationFailed(_) => 3,
        }
    }

    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }
}

impl From<tannaka::Error> for CliError {
    fn from(e: tannaka::Error) -> Self {
        use tannaka::Error as E;
        match e {
            E::GuardExceeded { .. }
            | E::LevelExceeded { .. }
            | E::SignUndefined
            | E::NotInvertible { .. }
            | E::DegreeOverflow { .. } => CliError::Refused(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
