use thiserror::Error;

/// Errors produced by the engines and the theory functions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole: {0}")]
    Pole(String),

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("degenerate ground state: gap {gap:.3e} below threshold {threshold:.1e}; {hint}")]
    Degenerate { gap: f64, threshold: f64, hint: String },

    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("size guard: {0}")]
    SizeGuard(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("regions overlap at site {0}")]
    Overlap(usize),

    #[error("zero-norm state after measurement")]
    ZeroNorm,

    #[error("rank-deficient fit: {0}")]
    RankDeficient(String),

    #[error("fit did not converge after {iterations} iterations (last params {last:?})")]
    NonConvergence { iterations: usize, last: Vec<f64> },

    #[error("regime violation: {0}")]
    Regime(String),

    #[error("insufficient overlap: {0}")]
    InsufficientOverlap(String),

    #[error("linear solve failed: smallest eigenvalue of A is {min_eig:.3e}")]
    LinearSolve { min_eig: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
