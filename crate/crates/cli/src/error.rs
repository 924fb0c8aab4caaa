use weylkit::codec::CodecError;
use weylkit::WeylError;

/// Failures of a run, split by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Unreadable file, malformed JSON, schema violation or bad parameter.
    #[error("validation error: {0}")]
    Validation(String),
    /// The scene was valid but the computation failed.
    #[error("numerical error: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    pub fn validation(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }
}

impl From<CodecError> for CliError {
    fn from(e: CodecError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<WeylError> for CliError {
    fn from(e: WeylError) -> Self {
        match e {
            WeylError::DimensionMismatch(_)
            | WeylError::NotHermitian { .. }
            | WeylError::NotPositive { .. }
            | WeylError::InvalidSandwich(_)
            | WeylError::InvalidMeasure(_)
            | WeylError::InvalidArgument(_) => CliError::Validation(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
