use thiserror::Error;

/// Errors raised by the operator, solver, iteration and fixture layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("dimension must be at least 1")]
    EmptyDimension,

    #[error("entry count {count} does not form a {dim}x{dim} matrix")]
    BadShape { dim: usize, count: usize },

    #[error("matrix is not symmetric: symmetrization correction {correction:e} exceeds 1e-9")]
    NotSymmetric { correction: f64 },

    #[error("non-finite entry in input")]
    NonFinite,

    #[error("vector is not normalized: norm {norm}")]
    NotNormalized { norm: f64 },

    #[error("zero vector (norm {norm:e}); iteration collapsed")]
    ZeroVector { norm: f64 },

    #[error("operators do not commute: commutator norm {norm} exceeds tolerance {tolerance:e}")]
    NotCommuting { norm: f64, tolerance: f64 },

    #[error("singular system: pivot {pivot:e} at row {row} below threshold {threshold:e}")]
    SingularSystem {
        row: usize,
        pivot: f64,
        threshold: f64,
    },

    #[error("unusable splitting: zero diagonal entry at row {row}")]
    UnusableSplitting { row: usize },

    #[error(
        "iterative solve did not converge after {sweeps} sweeps (relative residual {residual:e})"
    )]
    NonConvergence {
        sweeps: usize,
        residual: f64,
        last_iterate: Vec<f64>,
    },

    #[error("shift {mu} coincides with eigenvalue {sigma} of S (state {index})")]
    SingularShift { index: usize, sigma: f64, mu: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("spectrum is empty")]
    EmptySpectrum,

    #[error("Jacobi eigensolver failed after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    OracleFailure { sweeps: usize, off_norm: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
