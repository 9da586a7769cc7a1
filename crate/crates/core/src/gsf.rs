//! Gohberg-Semencul representation of a Toeplitz inverse.
//!
//! With x and y the solutions of `T x = e_1` and `T y = e_n` and
//! `xi0 = x[0] != 0`, the inverse factors as
//!
//! ```text
//! T^{-1} = (1/xi0) (L_x R_y - L_y^0 R_x^0)
//! ```
//!
//! where `L_x` is lower triangular Toeplitz with first column x, `R_y` upper
//! triangular Toeplitz with first row `(y_{n-1}, .., y_0)`, and the
//! zero-diagonal pair shifts y down and reversed-x up. Each factor embeds in
//! a power-of-two circulant whose spectrum is cached at build time, so one
//! inverse apply costs seven FFTs.

use std::sync::Arc;

use num_complex::Complex64;

use crate::circulant::chan_preconditioner;
use crate::dense::{one_norm_vec, two_norm, DenseMatrix};
use crate::error::{Error, Result};
use crate::fft::{next_pow2, FftPlan};
use crate::gmres::{gmres, SolveReport};
use crate::toeplitz::ToeplitzMatrix;

/// `|xi0|` must exceed this multiple of `||x||_2` (separates structural
/// zeros from solver roundoff).
pub const XI0_REL_THRESHOLD: f64 = 1e-12;

/// Which matrix norm enters the GSF condition number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormMode {
    /// Exact induced 1-norm of T.
    Exact1Norm,
    /// `max(||fcol||_1, ||frow||_1)` proxy.
    ColRowProxy,
}

/// Condition numbers derived from the fundamental solutions.
#[derive(Debug, Clone, Copy)]
pub struct ConditionNumbers {
    /// `kappa_1^GSF = ||T||_1 ||y||_1 / (|xi0| / ||x||_1)`.
    pub kappa_gsf: f64,
    /// Effective condition number of the e_n system: `||T||_1 ||y||_1`.
    pub kappa_eff_rhs: f64,
    /// `||x||_1 / |xi0|`, the estimate of the solution-side effective
    /// condition number.
    pub kappa_eff_sol_est: f64,
    /// The matrix norm that was used for `||T||_1`.
    pub t_norm: f64,
    pub mode: NormMode,
}

#[derive(Debug, Clone)]
struct FactorSpectra {
    plan: Arc<FftPlan>,
    lx: Vec<Complex64>,
    ry: Vec<Complex64>,
    ly0: Vec<Complex64>,
    rx0: Vec<Complex64>,
}

/// The GSF inverse operator.
#[derive(Debug, Clone)]
pub struct GsfInverse {
    n: usize,
    x: Vec<Complex64>,
    y: Vec<Complex64>,
    xi0: Complex64,
    factors: FactorSpectra,
    /// GMRES reports for the two fundamental systems, when built by a solver.
    pub solve_reports: Option<(SolveReport, SolveReport)>,
}

/// Embed a lower triangular Toeplitz first column in an L-point circulant.
fn lower_embedding(plan: &FftPlan, col: &[Complex64]) -> Vec<Complex64> {
    let l = plan.len();
    let mut c = vec![Complex64::new(0.0, 0.0); l];
    c[..col.len()].copy_from_slice(col);
    plan.forward(&mut c);
    c
}

/// Embed an upper triangular Toeplitz first row in an L-point circulant.
fn upper_embedding(plan: &FftPlan, row: &[Complex64]) -> Vec<Complex64> {
    let l = plan.len();
    let mut c = vec![Complex64::new(0.0, 0.0); l];
    c[0] = row[0];
    for (k, v) in row.iter().enumerate().skip(1) {
        c[l - k] = *v;
    }
    plan.forward(&mut c);
    c
}

impl GsfInverse {
    /// Assemble the representation from already-computed fundamental
    /// solutions. Fails with `XiZero` when `|x[0]|` is negligible relative
    /// to `||x||_2`.
    pub fn from_solutions(x: Vec<Complex64>, y: Vec<Complex64>) -> Result<Self> {
        let n = x.len();
        if n == 0 || y.len() != n {
            return Err(Error::DimensionMismatch {
                op: "gsf::from_solutions",
                expected: n.max(1),
                got: y.len(),
            });
        }
        let xi0 = x[0];
        let threshold = XI0_REL_THRESHOLD * two_norm(&x);
        if xi0.norm() <= threshold {
            return Err(Error::XiZero {
                xi0_abs: xi0.norm(),
                threshold,
            });
        }
        let plan = Arc::new(FftPlan::new(next_pow2(2 * n - 1)));

        // R_y first row: (y_{n-1}, y_{n-2}, .., y_0).
        let ry_row: Vec<Complex64> = (0..n).map(|j| y[n - 1 - j]).collect();
        // L_y^0 first column: (0, y_0, .., y_{n-2}).
        let mut ly0_col = vec![Complex64::new(0.0, 0.0); n];
        ly0_col[1..].copy_from_slice(&y[..n - 1]);
        // R_x^0 first row: (0, x_{n-1}, x_{n-2}, .., x_1).
        let mut rx0_row = vec![Complex64::new(0.0, 0.0); n];
        for j in 1..n {
            rx0_row[j] = x[n - j];
        }

        let factors = FactorSpectra {
            lx: lower_embedding(&plan, &x),
            ry: upper_embedding(&plan, &ry_row),
            ly0: lower_embedding(&plan, &ly0_col),
            rx0: upper_embedding(&plan, &rx0_row),
            plan,
        };
        Ok(Self {
            n,
            x,
            y,
            xi0,
            factors,
            solve_reports: None,
        })
    }

    /// Solve the two fundamental systems of `t` with circulant-preconditioned
    /// GMRES at tolerance `tol_sys` on the left-preconditioned residual, then
    /// assemble the representation.
    pub fn build(t: &ToeplitzMatrix, tol_sys: f64, max_iter: Option<usize>) -> Result<Self> {
        let n = t.n();
        let precond = chan_preconditioner(t)?;
        let max_iter = max_iter.unwrap_or_else(|| n.min(1000));
        let apply_op = |v: &[Complex64]| t.matvec(v).expect("dimension fixed by caller");
        let apply_precond =
            |v: &[Complex64]| precond.solve(v).expect("dimension fixed by caller");

        let mut e1 = vec![Complex64::new(0.0, 0.0); n];
        e1[0] = Complex64::new(1.0, 0.0);
        let rep_x = gmres(&apply_op, &apply_precond, &e1, tol_sys, max_iter)?;
        if !rep_x.converged {
            return Err(Error::SolverFailure {
                system: "T x = e_1",
                iterations: rep_x.iterations,
                final_residual: rep_x.final_precond_residual,
                tol: tol_sys,
            });
        }

        let mut en = vec![Complex64::new(0.0, 0.0); n];
        en[n - 1] = Complex64::new(1.0, 0.0);
        let rep_y = gmres(&apply_op, &apply_precond, &en, tol_sys, max_iter)?;
        if !rep_y.converged {
            return Err(Error::SolverFailure {
                system: "T y = e_n",
                iterations: rep_y.iterations,
                final_residual: rep_y.final_precond_residual,
                tol: tol_sys,
            });
        }

        let mut built = Self::from_solutions(rep_x.solution.clone(), rep_y.solution.clone())?;
        built.solve_reports = Some((rep_x, rep_y));
        Ok(built)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x(&self) -> &[Complex64] {
        &self.x
    }

    pub fn y(&self) -> &[Complex64] {
        &self.y
    }

    pub fn xi0(&self) -> Complex64 {
        self.xi0
    }

    /// Iteration counts of the two builds (0, 0) when assembled directly.
    pub fn solve_iterations(&self) -> (usize, usize) {
        self.solve_reports
            .as_ref()
            .map(|(a, b)| (a.iterations, b.iterations))
            .unwrap_or((0, 0))
    }

    /// `T^{-1} v = (1/xi0) (L_x (R_y v) - L_y^0 (R_x^0 v))`, seven FFTs.
    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch {
                op: "gsf::apply",
                expected: self.n,
                got: v.len(),
            });
        }
        let f = &self.factors;
        let l = f.plan.len();
        let n = self.n;

        let mut vhat = vec![Complex64::new(0.0, 0.0); l];
        vhat[..n].copy_from_slice(v);
        f.plan.forward(&mut vhat);

        // First stage: R_y v and R_x^0 v share the forward transform of v.
        let mut t1: Vec<Complex64> = vhat.iter().zip(&f.ry).map(|(a, b)| a * b).collect();
        f.plan.inverse(&mut t1);
        let mut t2: Vec<Complex64> = vhat.iter().zip(&f.rx0).map(|(a, b)| a * b).collect();
        f.plan.inverse(&mut t2);

        // Second stage: truncate to n, re-embed, multiply by the lower factors.
        for x in t1.iter_mut().skip(n) {
            *x = Complex64::new(0.0, 0.0);
        }
        f.plan.forward(&mut t1);
        for (a, b) in t1.iter_mut().zip(&f.lx) {
            *a *= b;
        }
        f.plan.inverse(&mut t1);

        for x in t2.iter_mut().skip(n) {
            *x = Complex64::new(0.0, 0.0);
        }
        f.plan.forward(&mut t2);
        for (a, b) in t2.iter_mut().zip(&f.ly0) {
            *a *= b;
        }
        f.plan.inverse(&mut t2);

        let inv_xi0 = Complex64::new(1.0, 0.0) / self.xi0;
        Ok((0..n).map(|i| inv_xi0 * (t1[i] - t2[i])).collect())
    }

    /// Dense materialization of the representation via the displacement
    /// recurrence `B[i+1][j+1] = B[i][j] + (x_{i+1} y_{n-2-j} - y_i x_{n-1-j}) / xi0`.
    pub fn materialize(&self) -> DenseMatrix {
        materialize_from(&self.x, &self.y, self.xi0)
    }

    /// GSF condition number of `t` plus its effective-condition factors.
    pub fn condition_numbers(&self, t: &ToeplitzMatrix, mode: NormMode) -> ConditionNumbers {
        let t_norm = match mode {
            NormMode::Exact1Norm => t.one_norm(),
            NormMode::ColRowProxy => t.one_norm_proxy(),
        };
        let x1 = one_norm_vec(&self.x);
        let y1 = one_norm_vec(&self.y);
        let kappa_eff_rhs = t_norm * y1;
        let kappa_eff_sol_est = x1 / self.xi0.norm();
        ConditionNumbers {
            kappa_gsf: kappa_eff_rhs * kappa_eff_sol_est,
            kappa_eff_rhs,
            kappa_eff_sol_est,
            t_norm,
            mode,
        }
    }
}

/// Materialize `(1/xi0)(L_x R_y - L_y^0 R_x^0)` for arbitrary solution pairs
/// (used for perturbed solutions as well as exact ones).
pub fn materialize_from(x: &[Complex64], y: &[Complex64], xi0: Complex64) -> DenseMatrix {
    let n = x.len();
    assert_eq!(y.len(), n);
    let inv_xi0 = Complex64::new(1.0, 0.0) / xi0;
    let mut b = DenseMatrix::zeros(n, n);
    for j in 0..n {
        b.set(0, j, inv_xi0 * (x[0] * y[n - 1 - j]));
    }
    for (i, &xi) in x.iter().enumerate().skip(1) {
        b.set(i, 0, inv_xi0 * (xi * y[n - 1]));
    }
    for i in 1..n {
        for j in 1..n {
            let prev = b.at(i - 1, j - 1);
            let update = x[i] * y[n - 1 - j] - y[i - 1] * x[n - j];
            b.set(i, j, prev + inv_xi0 * update);
        }
    }
    b
}
