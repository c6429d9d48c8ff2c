use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("value of {0} exceeds the representable range; use the log form")]
    Overflow(&'static str),

    #[error("truncation cap {cap} reached before the tail of {what} fell below tolerance")]
    TruncationCap { cap: usize, what: &'static str },

    #[error(
        "|xi| = {xi} is outside the convergence guard (estimated radius {radius}, guard {guard})"
    )]
    Domain { xi: f64, radius: f64, guard: f64 },

    #[error("series for {0} does not converge")]
    Divergent(&'static str),

    #[error("no convergence after {0} iterations")]
    NonConvergence(usize),

    #[error("results at truncation {n} and {n_plus} disagree by {err:e}")]
    TruncationMismatch { n: usize, n_plus: usize, err: f64 },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("state is not normalized (norm {0})")]
    Unnormalized(f64),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures caused by the numerics rather than by bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Overflow(_)
                | Error::TruncationCap { .. }
                | Error::Domain { .. }
                | Error::Divergent(_)
                | Error::NonConvergence(_)
                | Error::TruncationMismatch { .. }
        )
    }
}
