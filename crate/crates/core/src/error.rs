//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by rule construction, transforms, estimators and the
/// experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    /// A rule or operation received an invalid parameter.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Hard thresholding is discontinuous, so it has no almost-everywhere
    /// derivative usable in an unbiased risk estimate.
    #[error("hard thresholding has no Stein derivative (no-stein-derivative)")]
    NoSteinDerivative,

    /// Data-driven degrees of freedom do not exist for hard thresholding;
    /// its DOF requires the true coefficients (see `ht_dof_theoretical`).
    #[error("hard thresholding has no data-driven degrees of freedom (no-data-driven-dof)")]
    NoDataDrivenDof,

    /// An input lay outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Vector lengths do not agree.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A loaded design matrix failed the Gram check `XᵀX = n·I`.
    #[error("design is not orthogonal: max |XᵀX - nI| = {max_deviation:e} exceeds {tolerance:e}")]
    NotOrthogonal { max_deviation: f64, tolerance: f64 },

    /// An operation that needs at least one element received none.
    #[error("empty input: {0}")]
    EmptyInput(String),

    /// File I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// A CSV or JSON document could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
