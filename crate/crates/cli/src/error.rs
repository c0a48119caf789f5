use numoment::Error;
use thiserror::Error as ThisError;

/// A command failure, split by exit status.
#[derive(Debug, ThisError)]
pub enum CliError {
    /// Bad configuration, arguments or input files (exit 2).
    #[error("{0}")]
    Validation(String),
    /// The computation ran but did not succeed (exit 1).
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 1,
        }
    }

    pub fn validation(field: &str, msg: impl std::fmt::Display) -> Self {
        CliError::Validation(format!("{field}: {msg}"))
    }

    /// Classifies a library error, prefixing it with `context`.
    pub fn from_core(context: &str, e: Error) -> Self {
        let msg = format!("{context}: {e}");
        if is_numerical(&e) {
            CliError::Numerical(msg)
        } else {
            CliError::Validation(msg)
        }
    }
}

pub fn is_numerical(e: &Error) -> bool {
    match e {
        Error::Integration { .. }
        | Error::Boundary { .. }
        | Error::Domain { .. }
        | Error::Conditioning { .. }
        | Error::LineSearch { .. }
        | Error::InvariantViolation(_) => true,
        Error::AtLambda { source, .. } => is_numerical(source),
        _ => false,
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
