use thiserror::Error;

/// Errors raised anywhere in the numerical pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("matrix is not positive semidefinite: eigenvalue {min_eigenvalue:e} below -{tolerance:e} x largest")]
    NotPositiveSemidefinite { min_eigenvalue: f64, tolerance: f64 },

    #[error("eigendecomposition did not converge (dim {dim})")]
    EigenNoConvergence { dim: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("M = {m} exceeds the exact-method limit M <= {limit}; use the approximate method")]
    SizeLimit { m: usize, limit: usize },

    #[error("density matrix trace {trace} deviates from 1 by more than {tolerance:e}")]
    TraceDeviation { trace: f64, tolerance: f64 },

    #[error("Fock truncation at n_max = {n_max} loses probability {deficit:e} (budget {budget:e})")]
    Truncation { n_max: usize, deficit: f64, budget: f64 },

    #[error("no interior optimum: maximum of the coarse scan sits at the {edge} edge of the bracket [{lo}, {hi}]")]
    MonotoneEdge { edge: &'static str, lo: f64, hi: f64 },

    #[error("degenerate fit grid: {points} points, at least 3 required")]
    DegenerateGrid { points: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
