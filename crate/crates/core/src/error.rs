use thiserror::Error;

/// Errors raised by the verification engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("integer overflow computing {0}")]
    Overflow(String),

    #[error("singular matrix{} (condition estimate {condition:.3e})", index.map(|i| format!(" at component {i}")).unwrap_or_default())]
    SingularMatrix { index: Option<usize>, condition: f64 },

    #[error("commutativity violated: {0}")]
    NonCommuting(String),

    #[error("evaluation budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("instance generation failed after {attempts} attempts: {reason}")]
    GenerationFailure { attempts: usize, reason: String },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
