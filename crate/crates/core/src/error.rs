use thiserror::Error;

/// Errors raised by scoring, quadrature, perturbation and search routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid probability vector: {0}")]
    InvalidProbabilities(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid density: {0}")]
    InvalidDensity(String),

    #[error("invalid perturbation: {0}")]
    InvalidPerturbation(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("category index {index} out of range 1..={categories}")]
    IndexOutOfRange { index: usize, categories: usize },

    #[error("outcome {x} outside the grid domain [{lo}, {hi}]")]
    OutsideDomain { x: f64, lo: f64, hi: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("rule `{rule}` does not apply to {target}")]
    UnsupportedRule { rule: String, target: &'static str },

    #[error(
        "epsilon {epsilon} infeasible: |gamma| exceeds the margin-scaled target at grid index {index} (x = {x})"
    )]
    InfeasibleEpsilon { epsilon: f64, index: usize, x: f64 },

    #[error("no sign change on bracket: f(lo) = {lo_value}, f(hi) = {hi_value}")]
    BracketFailure { lo_value: f64, hi_value: f64 },

    #[error("no convergence after {iterations} iterations (residual {residual})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("quadrature check failed: {0}")]
    Quadrature(String),
}

impl Error {
    /// True for failures of a numeric procedure on otherwise valid input
    /// (root bracketing, convergence, quadrature drift).
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::BracketFailure { .. } | Error::NonConvergence { .. } | Error::Quadrature(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
