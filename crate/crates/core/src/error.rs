use thiserror::Error;

/// Errors raised by the estimators and the experiment harness.
#[derive(Debug, Error)]
pub enum DoaError {
    /// An argument lies outside the domain of the operation (e.g. |θ| ≥ 90°).
    #[error("domain error: {0}")]
    Domain(String),
    /// A structural precondition was violated (dimension mismatch, K ≥ M, ...).
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// The estimator could not produce K angles from the data.
    #[error("estimation failed: {0}")]
    Estimation(String),
    /// The Fisher information matrix could not be inverted.
    #[error("singular Fisher information (condition number {condition:.3e})")]
    SingularFisher { condition: f64 },
    #[error("config error: {0}")]
    Config(String),
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, DoaError>;
