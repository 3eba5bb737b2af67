use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid {name}: {reason}")]
    InvalidInput { name: &'static str, reason: String },

    #[error("eigensolver failed: {0}")]
    Eigen(String),

    #[error("not dispersive: |detuning| = {detuning_mhz:.3} MHz must exceed 5g = {limit_mhz:.3} MHz")]
    NotDispersive { detuning_mhz: f64, limit_mhz: f64 },

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("root finder did not converge after {0} iterations")]
    RootNotConverged(usize),

    #[error("IV analysis failed: {0}")]
    Analysis(String),

    #[error("singular normal equations (rank-deficient model at these parameters)")]
    Singular,

    #[error("no oscillation detected")]
    NoOscillation,
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidInput {
            name,
            reason: reason.into(),
        }
    }
}

/// Rejects non-finite and non-positive values.
pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::invalid(name, format!("must be finite and > 0, got {value}")))
    }
}
