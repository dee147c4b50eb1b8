use thiserror::Error;

/// Errors raised across the simulator, optimizer and circuit layers.
#[derive(Debug, Error)]
pub enum Error {
    /// Caller violated an operation's contract (size mismatch, bad argument).
    #[error("usage error: {0}")]
    Usage(String),

    /// The request is valid but beyond what this build supports (e.g. dense limits).
    #[error("capability error: {0}")]
    Capability(String),

    #[error("value {value} outside permitted range [{min}, {max}]")]
    Range { value: f64, min: f64, max: f64 },

    #[error("singular schedule: {0}")]
    Singularity(String),

    #[error("rank-deficient operator basis (rank {rank} of {size})")]
    RankDeficient { rank: usize, size: usize },

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("integrator step size underflow at t = {t} (h = {step:e})")]
    StiffFailure { t: f64, step: f64 },

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("counterdiabatic drive has zero strength; optimal amplitude undefined")]
    NoDrive,

    #[error("optimizer failure: {0}")]
    Optimizer(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Usage(msg.into()))
}
