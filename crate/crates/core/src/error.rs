use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("non-finite sample at index {0}")]
    NonFinite(usize),

    #[error("Laplacian eigenvalue {value} at mode {mode} is positive")]
    PositiveEigenvalue { mode: usize, value: f64 },

    #[error("time step must be positive and finite, got {0}")]
    InvalidTimeStep(f64),

    #[error("auxiliary variable radicand is negative ({0})")]
    NegativeRadicand(f64),

    #[error("rank-one solve denominator is not positive ({0})")]
    DegenerateDenominator(f64),

    #[error("2x2 scalar system is singular (|det| = {0:e})")]
    SingularSystem(f64),

    #[error("fixed-point iteration did not converge after {iters} iterations (last increment {increment:e})")]
    NoConvergence { iters: usize, increment: f64 },

    #[error("spectral multipliers are not conjugate symmetric")]
    NotConjugateSymmetric,

    #[error("invalid fixed-point configuration: {0}")]
    InvalidConfig(String),

    #[error("record list is empty")]
    EmptyRecords,

    #[error("convergence ladder entry {index} has non-positive error {value}")]
    NonPositiveError { index: usize, value: f64 },
}
