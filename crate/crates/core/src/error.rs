use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input violated a precondition. `field` names the offending input.
    #[error("invalid {field}: {reason}")]
    Domain { field: &'static str, reason: String },

    /// Two routes to the same quantity disagreed. Always an internal bug.
    #[error("consistency check failed for {quantity}: {lhs} vs {rhs} (relative gap {gap:e})")]
    Consistency {
        quantity: &'static str,
        lhs: f64,
        rhs: f64,
        gap: f64,
    },

    #[error(
        "height-form right-hand side is singular at H = {height:e}; integrate in u-coordinates"
    )]
    Singularity { height: f64 },

    #[error("step size underflow at s = {at} (h = {step:e})")]
    StepUnderflow { at: f64, step: f64 },

    #[error("horizon {horizon} exceeds the cap {cap}")]
    Horizon { horizon: f64, cap: f64 },

    #[error("no convergence after {iterations} iterations (last difference {last_diff:e})")]
    NonConvergence { iterations: usize, last_diff: f64 },

    #[error("inconclusive classification: {0}")]
    Inconclusive(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            field,
            reason: reason.into(),
        }
    }

    /// True when the error stems from user-supplied configuration rather than
    /// from the numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Domain { .. } | Error::Horizon { .. } | Error::Json(_)
        )
    }
}
