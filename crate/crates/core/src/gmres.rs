//! Unrestarted left-preconditioned GMRES.
//!
//! The Krylov space is built for M^{-1} T with modified Gram-Schmidt (one
//! conditional reorthogonalization pass) and the least-squares problem is
//! carried by Givens rotations, so the estimated preconditioned residual
//! `||M^{-1}(b - T x_k)||_2` is available per iteration at no extra cost.
//! The stopping test is absolute, matching the tolerance budget it serves.

use num_complex::Complex64;

use crate::dense::{dot_conj, two_norm};
use crate::error::{Error, Result};

/// Outcome of a GMRES solve.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub solution: Vec<Complex64>,
    pub iterations: usize,
    /// Recurrence estimate of `||M^{-1}(b - T x_k)||_2`, one entry per step.
    pub precond_residual_history: Vec<f64>,
    pub converged: bool,
    pub final_precond_residual: f64,
    /// `||M^{-1}(b - T x)||_2` recomputed from the returned solution.
    pub final_true_residual: f64,
    /// True when the run ended on the stagnation heuristic.
    pub stagnated: bool,
    /// Krylov basis columns, retained only by [`gmres_with_basis`].
    pub basis: Option<Vec<Vec<Complex64>>>,
}

/// Consecutive iterations with relative residual decrease below 1e-14
/// before the run is declared stagnant.
const STAGNATION_WINDOW: usize = 50;
const STAGNATION_DECREASE: f64 = 1e-14;

/// Solve `T q = b` for the operator `apply_op` under the left preconditioner
/// `apply_precond`, stopping when the estimated preconditioned residual drops
/// to `tol` (absolute) or `max_iter` steps have been taken.
pub fn gmres(
    apply_op: &dyn Fn(&[Complex64]) -> Vec<Complex64>,
    apply_precond: &dyn Fn(&[Complex64]) -> Vec<Complex64>,
    b: &[Complex64],
    tol: f64,
    max_iter: usize,
) -> Result<SolveReport> {
    gmres_impl(apply_op, apply_precond, b, tol, max_iter, false)
}

/// [`gmres`] that also returns the orthonormal Krylov basis (diagnostics;
/// memory is O(n * iterations)).
pub fn gmres_with_basis(
    apply_op: &dyn Fn(&[Complex64]) -> Vec<Complex64>,
    apply_precond: &dyn Fn(&[Complex64]) -> Vec<Complex64>,
    b: &[Complex64],
    tol: f64,
    max_iter: usize,
) -> Result<SolveReport> {
    gmres_impl(apply_op, apply_precond, b, tol, max_iter, true)
}

fn gmres_impl(
    apply_op: &dyn Fn(&[Complex64]) -> Vec<Complex64>,
    apply_precond: &dyn Fn(&[Complex64]) -> Vec<Complex64>,
    b: &[Complex64],
    tol: f64,
    max_iter: usize,
    keep_basis: bool,
) -> Result<SolveReport> {
    assert!(tol > 0.0, "gmres tolerance must be positive");
    assert!(max_iter >= 1);
    let n = b.len();
    let zero = Complex64::new(0.0, 0.0);

    if two_norm(b) == 0.0 {
        return Ok(SolveReport {
            solution: vec![zero; n],
            iterations: 0,
            precond_residual_history: Vec::new(),
            converged: true,
            final_precond_residual: 0.0,
            final_true_residual: 0.0,
            stagnated: false,
            basis: keep_basis.then(Vec::new),
        });
    }

    let r0 = checked(apply_precond(b), n, "gmres::apply_precond")?;
    let beta = two_norm(&r0);
    if beta <= tol {
        let final_true = beta;
        return Ok(SolveReport {
            solution: vec![zero; n],
            iterations: 0,
            precond_residual_history: Vec::new(),
            converged: true,
            final_precond_residual: beta,
            final_true_residual: final_true,
            stagnated: false,
            basis: keep_basis.then(Vec::new),
        });
    }

    let m_cap = max_iter.min(n);
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(m_cap + 1);
    basis.push(r0.iter().map(|v| v / beta).collect());

    // Columns of the Hessenberg matrix after Givens triangularization.
    let mut r_cols: Vec<Vec<Complex64>> = Vec::with_capacity(m_cap);
    let mut cs: Vec<Complex64> = Vec::with_capacity(m_cap);
    let mut sn: Vec<Complex64> = Vec::with_capacity(m_cap);
    let mut g = vec![zero; m_cap + 1];
    g[0] = Complex64::new(beta, 0.0);

    let mut history = Vec::with_capacity(m_cap);
    let mut converged = false;
    let mut stagnated = false;
    let mut stagnant_steps = 0usize;
    let mut prev_res = beta;
    let mut steps = 0usize;

    for j in 0..m_cap {
        let tv = checked(apply_op(&basis[j]), n, "gmres::apply_op")?;
        let mut w = checked(apply_precond(&tv), n, "gmres::apply_precond")?;
        let w_pre_norm = two_norm(&w);

        let mut h = vec![zero; j + 2];
        for (i, vi) in basis.iter().enumerate() {
            let hij = dot_conj(vi, &w);
            h[i] = hij;
            for (wk, vk) in w.iter_mut().zip(vi) {
                *wk -= hij * vk;
            }
        }
        // One reorthogonalization pass when cancellation ate the new vector.
        if two_norm(&w) < w_pre_norm / std::f64::consts::SQRT_2 {
            for (i, vi) in basis.iter().enumerate() {
                let corr = dot_conj(vi, &w);
                h[i] += corr;
                for (wk, vk) in w.iter_mut().zip(vi) {
                    *wk -= corr * vk;
                }
            }
        }
        let h_next = two_norm(&w);
        h[j + 1] = Complex64::new(h_next, 0.0);
        let breakdown = h_next <= 1e-14 * w_pre_norm;

        // Apply the accumulated rotations, then a new one to zero h[j+1].
        for i in 0..j {
            let tmp = cs[i].conj() * h[i] + sn[i].conj() * h[i + 1];
            h[i + 1] = -sn[i] * h[i] + cs[i] * h[i + 1];
            h[i] = tmp;
        }
        let (c, s) = givens(h[j], h[j + 1]);
        h[j] = c.conj() * h[j] + s.conj() * h[j + 1];
        h[j + 1] = zero;
        cs.push(c);
        sn.push(s);
        let gj = g[j];
        g[j + 1] = -s * gj;
        g[j] = c.conj() * gj;
        r_cols.push(h);

        steps = j + 1;
        let res = g[j + 1].norm();
        history.push(res);

        if res <= tol || breakdown {
            converged = true;
            break;
        }
        if prev_res - res < STAGNATION_DECREASE * prev_res {
            stagnant_steps += 1;
            if stagnant_steps >= STAGNATION_WINDOW {
                stagnated = true;
                break;
            }
        } else {
            stagnant_steps = 0;
        }
        prev_res = res;

        if !breakdown {
            basis.push(w.iter().map(|v| v / h_next).collect());
        }
    }

    // Back substitution for y in R y = g, then x = V y.
    let m = steps;
    let mut y = vec![zero; m];
    for i in (0..m).rev() {
        let mut acc = g[i];
        for k in (i + 1)..m {
            acc -= r_cols[k][i] * y[k];
        }
        y[i] = acc / r_cols[i][i];
    }
    let mut x = vec![zero; n];
    for (vi, yi) in basis.iter().take(m).zip(&y) {
        for (xk, vk) in x.iter_mut().zip(vi) {
            *xk += yi * vk;
        }
    }

    let tx = checked(apply_op(&x), n, "gmres::apply_op")?;
    let resid: Vec<Complex64> = b.iter().zip(&tx).map(|(bi, ti)| bi - ti).collect();
    let final_true_residual = two_norm(&apply_precond(&resid));
    let final_precond_residual = history.last().copied().unwrap_or(beta);

    Ok(SolveReport {
        solution: x,
        iterations: m,
        precond_residual_history: history,
        converged: converged && final_precond_residual <= tol,
        final_precond_residual,
        final_true_residual,
        stagnated,
        basis: keep_basis.then_some(basis),
    })
}

fn checked(v: Vec<Complex64>, n: usize, op: &'static str) -> Result<Vec<Complex64>> {
    if v.len() != n {
        return Err(Error::DimensionMismatch {
            op,
            expected: n,
            got: v.len(),
        });
    }
    Ok(v)
}

/// Complex Givens rotation zeroing the second component.
fn givens(a: Complex64, b: Complex64) -> (Complex64, Complex64) {
    let bn = b.norm();
    if bn == 0.0 {
        return (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    }
    let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
    (a / r, b / r)
}
