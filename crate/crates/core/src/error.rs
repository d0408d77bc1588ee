use thiserror::Error;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("diagnostics: non-finite value at t = {t:e} ({what})")]
    NonFinite { what: String, t: f64 },

    #[error("covering check failed: test point ({re:.12}, {im:.12}) at distance {distance:.6} from nearest center")]
    Uncovered { re: f64, im: f64, distance: f64 },

    #[error("failed to bracket the scaling parameter within [{lo:e}, {hi:e}]")]
    NoBracket { lo: f64, hi: f64 },

    #[error("non-finite function value at node {index} ({re:.6}, {im:.6})")]
    NonFiniteNode { index: usize, re: f64, im: f64 },

    #[error("cell {cell} received no quadrature nodes; increase rule resolution")]
    EmptyCell { cell: usize },

    #[error("Neumann iteration did not reach tol {tol:e} within {iters} iterations (last residual {last:e})")]
    NotConverged { tol: f64, iters: usize, last: f64, history: Vec<f64> },

    #[error("factorization hypothesis failed at u = {u:e}: relative mismatch {mismatch:e}")]
    Hypothesis { u: f64, mismatch: f64 },

    #[error("coefficient outside the normalized regime: {0}")]
    Normalization(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
