use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A request exceeded a precomputed table or a combinatorial budget.
    #[error("capacity exceeded: {what} (requested {requested}, limit {limit})")]
    Capacity {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error("invalid input: {0}")]
    Input(String),

    /// The singular weight is not locally integrable for this dimension count.
    #[error("inadmissible weight: delta = {delta} over {dims} weighted axes")]
    Inadmissible { dims: usize, delta: f64 },

    /// Doubling all rule sizes moved a result by more than its tolerance.
    #[error("{what}: doubling changed the value from {coarse} to {fine} (tolerance {tolerance:e})")]
    Tolerance {
        what: String,
        coarse: f64,
        fine: f64,
        tolerance: f64,
    },

    #[error("power iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    /// An internal cross-check between two independent routes disagreed.
    #[error("validation failed: {0}")]
    Validation(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    /// Errors caused by the caller's parameters rather than by numerics.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Capacity { .. } | Error::Input(_) | Error::Inadmissible { .. }
        )
    }
}
