use thiserror::Error;

/// Errors for phase-space computations.
#[derive(Debug, Error)]
pub enum GqbcError {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension must be even and nonzero, got {0}")]
    OddDimension(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not symmetric (residual {residual:.3e} > {tol:.3e})")]
    NotSymmetric { residual: f64, tol: f64 },

    #[error("Heisenberg inequality violated: min eigenvalue of gamma + i*Omega is {min_eig:.6e}")]
    Physicality { min_eig: f64 },

    #[error("state is not pure (symplectic eigenvalue {nu} deviates from 1 by {deviation:.3e})")]
    NotPure { nu: f64, deviation: f64 },

    #[error("reduced states differ beyond tolerance (residual {residual:.3e} > {tol:.3e})")]
    ReducedMismatch { residual: f64, tol: f64 },

    #[error("gauge resolution failed: {0}")]
    Gauge(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("certification failed: delta {delta:.6e} exceeds bound {bound:.6e}")]
    CertificationFailure { delta: f64, bound: f64 },
}
