use thiserror::Error;

/// Errors raised by the numerical pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("non-finite value in {what} at index {index}")]
    NonFinite { what: &'static str, index: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not positive definite ({0})")]
    NotPositiveDefinite(String),

    #[error("inverse iteration did not converge for eigenvalue {value:e} after {iterations} steps (residual {residual:e})")]
    NoConvergence {
        value: f64,
        iterations: usize,
        residual: f64,
    },

    #[error("eigenvalue index {j} not available: only {available} negative eigenvalues")]
    IndexUnavailable { j: usize, available: usize },

    #[error("monotonicity violated: {0}")]
    NotMonotone(String),

    #[error("branch precondition violated: {0}")]
    BranchPrecondition(String),

    #[error("smallness condition ||V^(-)||_inf <= 1 violated: ||V^(-)||_inf = {0}")]
    SmallnessViolated(f64),

    #[error("no sign change of f_j on the bracket: {0}")]
    NoSignChange(String),

    #[error("denominator lambda + u vanishes at node {node} (|value| = {value:e})")]
    VanishingDenominator { node: usize, value: f64 },

    #[error("trivial (zero) vector")]
    ZeroVector,

    #[error("root search failed: {0}")]
    RootSearch(String),

    #[error("domain violation: {0}")]
    Domain(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_finite(what: &'static str, values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite { what, index }),
        None => Ok(()),
    }
}
