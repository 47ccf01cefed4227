use thiserror::Error;

/// Errors raised by the analytic evaluators, the simulator and the CLI layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular anchor geometry (FIM determinant {determinant:e} <= 1e-12)")]
    SingularGeometry { determinant: f64 },

    #[error("quadrature did not converge: achieved {achieved:e}, requested {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("pmf is not normalized: total mass {total}")]
    NotNormalized { total: f64 },

    #[error("pmf entry {ell} is negative ({value:e}) beyond quadrature noise")]
    NegativeProbability { ell: usize, value: f64 },

    #[error("tabulated cdf decreases at grid index {index}")]
    NonMonotone { index: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("edge effects: {fraction:.4} of realizations had a hearable anchor near the disk boundary; use a larger disk")]
    EdgeEffect { fraction: f64 },

    #[error("usage: {0}")]
    Usage(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
