use thiserror::Error;

/// Errors raised while building parameter sets or evaluating the linearized model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("non-finite value for `{0}`")]
    NonFinite(&'static str),

    /// The loop denominator vanished on the real frequency axis.
    #[error("loop denominator vanishes at ω = {omega:e} rad/s (parametric instability)")]
    Singular { omega: f64 },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("mechanical mode is unstable: effective damping {gamma_eff:e} rad/s is not positive")]
    Unstable { gamma_eff: f64 },
}

impl ModelError {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        ModelError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

/// Errors from the analysis and fitting routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Model(#[from] ModelError),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("objective is flat; the parameter is not identifiable from this data")]
    Unidentifiable,

    #[error("no peak found in the data")]
    NoPeak,

    #[error("fit did not converge after {iterations} iterations (last iterate {last:?})")]
    NoConvergence { iterations: usize, last: Vec<f64> },
}

pub type Result<T, E = ModelError> = std::result::Result<T, E>;

pub(crate) fn ensure_finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(ModelError::NonFinite(name))
    }
}
