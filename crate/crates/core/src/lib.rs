//! Action of a Toeplitz matrix exponential on a vector, `y(t) = exp(-tA) v`,
//! by the shift-and-invert Arnoldi method with a Gohberg-Semencul (GSF)
//! representation of `(I + gamma A)^{-1}`.
//!
//! The pieces, bottom up:
//!
//! - [`toeplitz`]: implicit Toeplitz matrices, FFT matvec via circulant
//!   embedding, symbol-based test generators, exact norms.
//! - [`circulant`]: T. Chan's Frobenius-optimal circulant preconditioner.
//! - [`gmres`]: unrestarted left-preconditioned GMRES with an absolute
//!   stopping rule on the preconditioned residual.
//! - [`gsf`]: the inverse representation built from the two fundamental
//!   solutions `T x = e_1`, `T y = e_n`, its fast apply, and the GSF
//!   condition number.
//! - [`expm`]: the Arnoldi loop, the small dense exponential, and the cheap
//!   residual recurrence.
//! - [`bounds`]: perturbation bounds for the GSF inverse (size-independent
//!   and the classical Gutknecht-Hochbruck comparison), with dense-oracle
//!   true errors.
//! - [`driver`]: tolerance budgeting for inexact inner solves, the exact and
//!   inexact end-to-end algorithms, residual-gap verification, and the
//!   experiment sweeps behind the CLI tables.
//!
//! Heavy loops (dense factorization sweeps, oracle materializations,
//! experiment cells) are data-parallel under the default `parallel` feature
//! and degrade to sequential loops without it.

pub mod bounds;
pub mod circulant;
pub mod dense;
pub mod driver;
pub mod error;
pub mod expm;
pub mod fft;
pub mod gmres;
pub mod gsf;
pub mod io;
mod par;
pub mod rng;
pub mod testing;
pub mod toeplitz;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use toeplitz::{SymbolKind, SymbolSpec, ToeplitzMatrix, DENSE_CAP_DEFAULT};
