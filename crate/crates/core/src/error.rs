use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("tail constant is only defined for alpha = 4 (got alpha = {0})")]
    TailConstantUndefined(f64),

    #[error("quantile search failed: survival is still above {target:e} at x = {upper:e}")]
    QuantileSearch { target: f64, upper: f64 },

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("rank of Q is {rank}, above the allowed 2m = {limit}")]
    RankTooLarge { rank: usize, limit: usize },

    #[error("l = {l} is above the enumeration cap {cap}")]
    EnumerationCap { l: usize, cap: usize },

    #[error("root bracket failure for {function} at theta = {theta}")]
    Bracket { function: &'static str, theta: f64 },

    #[error("grid supremum {grid} and analytic value {analytic} disagree by more than {tolerance:e}")]
    SupremumMismatch { grid: f64, analytic: f64, tolerance: f64 },

    #[error("spike monotonicity violated: lambda1(P) = {perturbed} < lambda1(scale*A) = {unperturbed}")]
    Monotonicity { perturbed: f64, unperturbed: f64 },

    #[error("trial n = {n}, index = {trial_index}, seed = {seed}: {source}")]
    Trial {
        n: usize,
        trial_index: usize,
        seed: u64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
