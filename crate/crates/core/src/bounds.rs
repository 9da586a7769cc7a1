//! Perturbation analysis of the GSF inverse.
//!
//! When the fundamental solutions are known only up to relative errors
//! `||x~ - x||_1 <= eps ||x||_1` (likewise for y), the reconstructed inverse
//! `T~^{-1}` built from the perturbed solutions deviates from `T^{-1}` by at
//! most
//!
//! ```text
//! |2/xi0| [eps + (eps + (1+eps) eps~)(1+eps)] ||x||_1 ||y||_1
//! ```
//!
//! in both the 1- and 2-norm (absolute), with relative variants scaled by
//! `min(||x||_1, ||y||_1)` and, for the 2-norm, an extra `sqrt(n)`. The
//! classical Gutknecht-Hochbruck bounds, reduced to their solver-error term,
//! grow like `4n`; both families are evaluated here, next to true errors
//! measured against a dense-inverse oracle.

use num_complex::Complex64;

use crate::dense::{one_norm_vec, two_norm, DenseMatrix};
use crate::error::{Error, Result};
use crate::gsf::materialize_from;
use crate::rng::SplitMix64;
use crate::toeplitz::ToeplitzMatrix;

/// Which vector norm normalizes the perturbation direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    OneNorm,
    TwoNorm,
}

/// Deterministic perturbation recipe `x~ = x + eps ||x|| f`, with `f` a
/// seeded standard-normal draw normalized in the chosen norm.
#[derive(Debug, Clone, Copy)]
pub struct PerturbationSpec {
    pub epsilon: f64,
    pub norm_kind: NormKind,
    pub seed: u64,
}

impl PerturbationSpec {
    pub fn new(epsilon: f64, norm_kind: NormKind, seed: u64) -> Self {
        assert!(epsilon >= 0.0);
        Self {
            epsilon,
            norm_kind,
            seed,
        }
    }
}

fn norm_of(kind: NormKind, v: &[Complex64]) -> f64 {
    match kind {
        NormKind::OneNorm => one_norm_vec(v),
        NormKind::TwoNorm => two_norm(v),
    }
}

/// Seeded unit-norm noise direction (real entries).
fn noise_direction(n: usize, rng: &mut SplitMix64, kind: NormKind) -> Vec<Complex64> {
    loop {
        let f: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.next_normal(), 0.0))
            .collect();
        let norm = norm_of(kind, &f);
        if norm > 0.0 {
            return f.iter().map(|v| v / norm).collect();
        }
    }
}

/// Perturb both fundamental solutions with independent draws from one seeded
/// stream: `x~ = x + eps ||x|| f`, `y~ = y + eps ||y|| g`.
pub fn perturb_solutions(
    x: &[Complex64],
    y: &[Complex64],
    spec: &PerturbationSpec,
) -> (Vec<Complex64>, Vec<Complex64>) {
    let mut rng = SplitMix64::new(spec.seed);
    let fx = noise_direction(x.len(), &mut rng, spec.norm_kind);
    let fy = noise_direction(y.len(), &mut rng, spec.norm_kind);
    let sx = spec.epsilon * norm_of(spec.norm_kind, x);
    let sy = spec.epsilon * norm_of(spec.norm_kind, y);
    let xt = x.iter().zip(&fx).map(|(a, f)| a + sx * f).collect();
    let yt = y.iter().zip(&fy).map(|(a, f)| a + sy * f).collect();
    (xt, yt)
}

/// Relative error of `1/xi0~` with respect to `1/xi0`.
pub fn eps_tilde(xi0: Complex64, xi0_tilde: Complex64) -> f64 {
    let inv = 1.0 / xi0;
    let inv_t = 1.0 / xi0_tilde;
    (inv - inv_t).norm() / inv.norm()
}

fn error_factor(eps: f64, eps_tilde: f64) -> f64 {
    eps + (eps + (1.0 + eps) * eps_tilde) * (1.0 + eps)
}

fn check_xi0(xi0: Complex64) -> Result<()> {
    if xi0.norm() == 0.0 {
        return Err(Error::XiZero {
            xi0_abs: 0.0,
            threshold: 0.0,
        });
    }
    Ok(())
}

/// Absolute 1-norm bound `|2/xi0| [eps + (eps + (1+eps)eps~)(1+eps)] ||x||_1 ||y||_1`.
pub fn gsf_bound_abs_1norm(
    eps: f64,
    eps_tilde: f64,
    x: &[Complex64],
    y: &[Complex64],
    xi0: Complex64,
) -> Result<f64> {
    check_xi0(xi0)?;
    Ok((2.0 / xi0.norm()) * error_factor(eps, eps_tilde) * one_norm_vec(x) * one_norm_vec(y))
}

/// Relative 1-norm bound with `min(||x||_1, ||y||_1)` in place of the product.
pub fn gsf_bound_rel_1norm(
    eps: f64,
    eps_tilde: f64,
    x: &[Complex64],
    y: &[Complex64],
    xi0: Complex64,
) -> Result<f64> {
    check_xi0(xi0)?;
    let min = one_norm_vec(x).min(one_norm_vec(y));
    Ok((2.0 / xi0.norm()) * error_factor(eps, eps_tilde) * min)
}

/// Absolute 2-norm bound; identical expression to the 1-norm one.
pub fn gsf_bound_abs_2norm(
    eps: f64,
    eps_tilde: f64,
    x: &[Complex64],
    y: &[Complex64],
    xi0: Complex64,
) -> Result<f64> {
    gsf_bound_abs_1norm(eps, eps_tilde, x, y, xi0)
}

/// Relative 2-norm bound; picks up a sqrt(n) over the 1-norm variant.
pub fn gsf_bound_rel_2norm(
    eps: f64,
    eps_tilde: f64,
    x: &[Complex64],
    y: &[Complex64],
    xi0: Complex64,
    n: usize,
) -> Result<f64> {
    check_xi0(xi0)?;
    let min = one_norm_vec(x).min(one_norm_vec(y));
    Ok((2.0 * (n as f64).sqrt() / xi0.norm()) * error_factor(eps, eps_tilde) * min)
}

/// Gutknecht-Hochbruck absolute 2-norm bound, machine-epsilon term dropped:
/// `|4n/xi0| ||x||_2 ||y||_2 eps`.
pub fn gh_bound_abs_2norm(
    eps: f64,
    x: &[Complex64],
    y: &[Complex64],
    xi0: Complex64,
    n: usize,
) -> Result<f64> {
    check_xi0(xi0)?;
    Ok((4.0 * n as f64 / xi0.norm()) * two_norm(x) * two_norm(y) * eps)
}

/// Gutknecht-Hochbruck relative 2-norm bound: `|4n/xi0| ||T^{-1}||_2 eps`.
pub fn gh_bound_rel_2norm(eps: f64, xi0: Complex64, n: usize, inv_two_norm: f64) -> Result<f64> {
    check_xi0(xi0)?;
    Ok((4.0 * n as f64 / xi0.norm()) * inv_two_norm * eps)
}

/// The four norm errors of a perturbed reconstruction against the dense
/// inverse.
#[derive(Debug, Clone, Copy)]
pub struct TrueErrors {
    pub abs_one: f64,
    pub abs_two: f64,
    pub rel_one: f64,
    pub rel_two: f64,
}

/// Dense inverse of one matrix, factored once and reused across perturbation
/// cells.
#[derive(Debug, Clone)]
pub struct DenseInverseOracle {
    inverse: DenseMatrix,
    inv_one_norm: f64,
    inv_two_norm: f64,
}

/// Tolerance and cap for the oracle's spectral-norm power iteration.
const SPECTRAL_TOL: f64 = 1e-6;
const SPECTRAL_MAX_ITER: usize = 300;

impl DenseInverseOracle {
    pub fn new(t: &ToeplitzMatrix, cap: usize) -> Result<Self> {
        let dense = t.to_dense(cap)?;
        let inverse = dense.lu()?.inverse();
        let inv_one_norm = inverse.one_norm();
        let inv_two_norm = inverse.spectral_norm_est(SPECTRAL_TOL, SPECTRAL_MAX_ITER);
        Ok(Self {
            inverse,
            inv_one_norm,
            inv_two_norm,
        })
    }

    pub fn inverse(&self) -> &DenseMatrix {
        &self.inverse
    }

    pub fn inv_one_norm(&self) -> f64 {
        self.inv_one_norm
    }

    pub fn inv_two_norm(&self) -> f64 {
        self.inv_two_norm
    }

    /// Materialize the perturbed reconstruction and measure it against the
    /// dense inverse.
    pub fn true_errors(&self, x_tilde: &[Complex64], y_tilde: &[Complex64]) -> Result<TrueErrors> {
        let n = self.inverse.n_rows();
        if x_tilde.len() != n || y_tilde.len() != n {
            return Err(Error::DimensionMismatch {
                op: "bounds::true_errors",
                expected: n,
                got: x_tilde.len().min(y_tilde.len()),
            });
        }
        let xi0t = x_tilde[0];
        if xi0t.norm() <= 1e-12 * two_norm(x_tilde) {
            return Err(Error::XiZero {
                xi0_abs: xi0t.norm(),
                threshold: 1e-12 * two_norm(x_tilde),
            });
        }
        let rec = materialize_from(x_tilde, y_tilde, xi0t);
        let diff = self.inverse.sub(&rec);
        let abs_one = diff.one_norm();
        let abs_two = diff.spectral_norm_est(SPECTRAL_TOL, SPECTRAL_MAX_ITER);
        Ok(TrueErrors {
            abs_one,
            abs_two,
            rel_one: abs_one / self.inv_one_norm,
            rel_two: abs_two / self.inv_two_norm,
        })
    }
}

/// One-shot variant of [`DenseInverseOracle::true_errors`].
pub fn true_inverse_errors(
    t: &ToeplitzMatrix,
    x_tilde: &[Complex64],
    y_tilde: &[Complex64],
    cap: usize,
) -> Result<TrueErrors> {
    DenseInverseOracle::new(t, cap)?.true_errors(x_tilde, y_tilde)
}

/// Everything a bound-comparison table needs for one (n, eps, seed) cell.
#[derive(Debug, Clone, Copy)]
pub struct BoundReport {
    pub n: usize,
    pub eps: f64,
    pub eps_tilde: f64,
    pub abs_bound_1norm: f64,
    pub rel_bound_1norm: f64,
    pub abs_bound_2norm: f64,
    pub rel_bound_2norm: f64,
    pub gh_abs_bound_2norm: f64,
    pub gh_rel_bound_2norm: f64,
    pub true_abs_1norm: f64,
    pub true_rel_1norm: f64,
    pub true_abs_2norm: f64,
    pub true_rel_2norm: f64,
}

/// Evaluate every bound plus oracle truth for one perturbation draw.
///
/// `x`, `y` are the (accurately solved) fundamental solutions of `t`.
pub fn evaluate_bounds(
    t: &ToeplitzMatrix,
    x: &[Complex64],
    y: &[Complex64],
    spec: &PerturbationSpec,
    oracle: &DenseInverseOracle,
) -> Result<BoundReport> {
    let n = t.n();
    let (xt, yt) = perturb_solutions(x, y, spec);
    let xi0 = x[0];
    let et = eps_tilde(xi0, xt[0]);
    let eps = spec.epsilon;
    let truth = oracle.true_errors(&xt, &yt)?;
    Ok(BoundReport {
        n,
        eps,
        eps_tilde: et,
        abs_bound_1norm: gsf_bound_abs_1norm(eps, et, x, y, xi0)?,
        rel_bound_1norm: gsf_bound_rel_1norm(eps, et, x, y, xi0)?,
        abs_bound_2norm: gsf_bound_abs_2norm(eps, et, x, y, xi0)?,
        rel_bound_2norm: gsf_bound_rel_2norm(eps, et, x, y, xi0, n)?,
        gh_abs_bound_2norm: gh_bound_abs_2norm(eps, x, y, xi0, n)?,
        gh_rel_bound_2norm: gh_bound_rel_2norm(eps, xi0, n, oracle.inv_two_norm())?,
        true_abs_1norm: truth.abs_one,
        true_rel_1norm: truth.rel_one,
        true_abs_2norm: truth.abs_two,
        true_rel_2norm: truth.rel_two,
    })
}
