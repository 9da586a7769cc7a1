//! Error type shared by all modules.

use thiserror::Error;

/// Errors raised by the Toeplitz exponential machinery.
///
/// Messages carry enough context (operation, offending sizes or magnitudes)
/// to be printed as-is by a driver or CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected length {expected}, got {got} (in {op})")]
    DimensionMismatch {
        op: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("toeplitz::from_columns: first entries of column and row differ by {diff:e} (> 1e-14)")]
    DiagonalMismatch { diff: f64 },

    #[error("dense materialization refused: n = {n} exceeds dense cap {cap}")]
    DenseCapExceeded { n: usize, cap: usize },

    #[error("circulant preconditioner is singular: smallest eigenvalue magnitude {min_abs:e}")]
    SingularPreconditioner { min_abs: f64 },

    #[error(
        "gsf: |xi0| = {xi0_abs:e} is below threshold {threshold:e}; \
         the inverse representation requires xi0 != 0"
    )]
    XiZero { xi0_abs: f64, threshold: f64 },

    #[error(
        "gmres failed on the {system} system: not converged after {iterations} iterations, \
         preconditioned residual {final_residual:e} (tolerance {tol:e})"
    )]
    SolverFailure {
        system: &'static str,
        iterations: usize,
        final_residual: f64,
        tol: f64,
    },

    #[error("krylov: Hessenberg matrix is numerically singular at step {step}")]
    SingularHessenberg { step: usize },

    #[error("krylov: Arnoldi state used after breakdown")]
    UsedAfterBreakdown,

    #[error("dense LU: matrix is numerically singular (pivot {pivot:e} at column {col})")]
    SingularMatrix { pivot: f64, col: usize },

    #[error("relative_error: reference vector has zero norm")]
    ZeroReference,

    #[error("starting vector has zero norm (in {op})")]
    ZeroVector { op: &'static str },

    #[error("matrix file: {0}")]
    Parse(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
