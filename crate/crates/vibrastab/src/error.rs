//! Crate-wide error type.

/// Errors surfaced by the numeric core.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("aliasing guard: {0}")]
    Aliasing(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid excitation: {0}")]
    InvalidExcitation(String),

    #[error("integration failure: {0}")]
    IntegrationFailure(String),

    #[error("singular matrix: {0}")]
    SingularMatrix(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),
}

pub type Result<T> = std::result::Result<T, Error>;
