use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid order (k = {k}, n = {n}): need 1 <= k <= n and n >= 2")]
    InvalidOrder { k: u32, n: u32 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("grid index {index} out of range (grid has {len} nodes)")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("quadrature did not converge (best estimate {estimate:e}, error estimate {error:e})")]
    QuadratureFailed { estimate: f64, error: f64 },

    #[error("the Hölder lower bound degenerates at n/k = 2; use the logarithmic variant")]
    HolderCriticalRatio,

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("solver did not converge for (k = {k}, n = {n}) after {iterations} iterations")]
    NotConverged { k: u32, n: u32, iterations: usize },

    #[error("series evaluation did not converge: {0}")]
    SeriesFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
