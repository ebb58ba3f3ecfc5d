use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid family descriptor `{0}`: {1}")]
    InvalidFamily(String, String),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("graph is not regular")]
    NotRegular,

    #[error("resource budget exceeded: need {needed} vertices, budget is {budget}")]
    Budget { needed: usize, budget: usize },

    #[error("exhaustive enumeration infeasible on {vertices} vertices (threshold {threshold}); use the heuristic or sampled mode")]
    TooLarge { vertices: usize, threshold: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("set is not interior to the window: {0}")]
    NotInterior(String),

    #[error("solver did not converge after {iterations} iterations (relative residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
