//! End-to-end drivers: tolerance budgeting, the exact and inexact
//! algorithms, residual-gap verification, and the experiment sweeps the CLI
//! serializes.
//!
//! The budget ties the inner (Toeplitz system) tolerance to the outer
//! (exponential residual) tolerance:
//!
//! ```text
//! tol_sys = |gamma| tol_exp / (6 sqrt(m) max(||fcol||_2, ||frow||_2))
//! ```
//!
//! with m fixed to the iteration cap up front, and fcol/frow the first
//! column/row of `I + gamma A`. Solving the two fundamental systems to
//! `tol_sys` keeps the gap between the true ODE residual and the cheap
//! recurrence residual at the order of `tol_exp`.

use std::time::Instant;

use num_complex::Complex64;

use crate::bounds::{evaluate_bounds, BoundReport, DenseInverseOracle, NormKind, PerturbationSpec};
use crate::dense::{two_norm, DenseMatrix};
use crate::error::{Error, Result};
use crate::expm::{approx_exponential, small_expm, ExpmResult};
use crate::gsf::{ConditionNumbers, GsfInverse, NormMode};
use crate::par;
use crate::toeplitz::{SymbolKind, SymbolSpec, ToeplitzMatrix};

/// Inner tolerance that stands in for an exact solve.
pub const TOL_SYS_EXACT: f64 = 1e-14;

/// Default outer iteration cap; also the m pinned inside the budget.
pub const M_CAP_DEFAULT: usize = 100;

/// The inner-solver tolerance derived from the outer one.
#[derive(Debug, Clone, Copy)]
pub struct ToleranceBudget {
    pub tol_exp: f64,
    pub tol_sys: f64,
    pub gamma: f64,
    pub m_cap: usize,
    /// `max(||fcol||_2, ||frow||_2)` of `I + gamma A`.
    pub norm_factor: f64,
}

/// Compute the budget for `A` at shift `gamma`.
pub fn tolerance_budget(
    a: &ToeplitzMatrix,
    gamma: f64,
    tol_exp: f64,
    m_cap: usize,
) -> ToleranceBudget {
    assert!(tol_exp > 0.0);
    assert!(gamma != 0.0);
    assert!(m_cap >= 1);
    let shifted = a.shifted(gamma);
    let norm_factor = two_norm(shifted.first_col()).max(two_norm(shifted.first_row()));
    let tol_sys = gamma.abs() * tol_exp / (6.0 * (m_cap as f64).sqrt() * norm_factor);
    ToleranceBudget {
        tol_exp,
        tol_sys,
        gamma,
        m_cap,
        norm_factor,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Exact,
    Inexact,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Exact => "exact",
            Algorithm::Inexact => "inexact",
        }
    }
}

/// Wall-clock seconds per phase.
#[derive(Debug, Clone, Copy, Default)]
pub struct PhaseTimings {
    pub solve_systems: f64,
    pub arnoldi: f64,
    pub total: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub m_max: usize,
    pub keep_basis: bool,
    pub gmres_max_iter: Option<usize>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            m_max: M_CAP_DEFAULT,
            keep_basis: false,
            gmres_max_iter: None,
        }
    }
}

/// Everything one end-to-end run produces.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub algorithm: Algorithm,
    pub expm: ExpmResult,
    pub gsf_iterations: (usize, usize),
    pub budget: Option<ToleranceBudget>,
    pub tol_sys: f64,
    pub timings: PhaseTimings,
    pub relative_error: Option<f64>,
    pub residual_gap: Option<f64>,
    /// `||I + gamma A||_1 / (||H~^{-1}||_2 ||u_m||_2)` — the a-posteriori
    /// check of the assumption behind the practical budget.
    pub assumption_ratio: Option<f64>,
}

#[allow(clippy::too_many_arguments)]
fn run_with_tol(
    a: &ToeplitzMatrix,
    v: &[Complex64],
    t: f64,
    gamma: f64,
    tol_exp: f64,
    tol_sys: f64,
    algorithm: Algorithm,
    budget: Option<ToleranceBudget>,
    opts: &RunOptions,
) -> Result<RunReport> {
    if two_norm(v) == 0.0 {
        return Err(Error::ZeroVector { op: "driver::run" });
    }
    let t_start = Instant::now();
    let shifted = a.shifted(gamma);

    let t_solve = Instant::now();
    let gsf = GsfInverse::build(&shifted, tol_sys, opts.gmres_max_iter)?;
    let solve_secs = t_solve.elapsed().as_secs_f64();

    let t_arnoldi = Instant::now();
    let fwd = |w: &[Complex64]| shifted.matvec(w).expect("dimension fixed by driver");
    let inv = |w: &[Complex64]| gsf.apply(w).expect("dimension fixed by driver");
    let mut expm = approx_exponential(
        &fwd,
        &inv,
        v,
        t,
        gamma,
        tol_exp,
        opts.m_max,
        opts.keep_basis,
    )?;
    expm.tol_sys_used = Some(tol_sys);
    let arnoldi_secs = t_arnoldi.elapsed().as_secs_f64();

    let assumption_ratio = expm.basis.as_ref().map(|basis| {
        let h_inv_norm = basis
            .h_square
            .lu()
            .map(|lu| lu.inverse().spectral_norm_est(1e-8, 200))
            .unwrap_or(f64::INFINITY);
        shifted.one_norm() / (h_inv_norm * two_norm(&expm.u))
    });

    Ok(RunReport {
        algorithm,
        expm,
        gsf_iterations: gsf.solve_iterations(),
        budget,
        tol_sys,
        timings: PhaseTimings {
            solve_systems: solve_secs,
            arnoldi: arnoldi_secs,
            total: t_start.elapsed().as_secs_f64(),
        },
        relative_error: None,
        residual_gap: None,
        assumption_ratio,
    })
}

/// Exact algorithm: the two fundamental systems are solved to 1e-14.
pub fn run_exact(
    a: &ToeplitzMatrix,
    v: &[Complex64],
    t: f64,
    gamma: f64,
    tol_exp: f64,
    opts: &RunOptions,
) -> Result<RunReport> {
    run_with_tol(
        a,
        v,
        t,
        gamma,
        tol_exp,
        TOL_SYS_EXACT,
        Algorithm::Exact,
        None,
        opts,
    )
}

/// Inexact algorithm: the inner tolerance comes from the budget.
pub fn run_inexact(
    a: &ToeplitzMatrix,
    v: &[Complex64],
    t: f64,
    gamma: f64,
    tol_exp: f64,
    opts: &RunOptions,
) -> Result<RunReport> {
    let budget = tolerance_budget(a, gamma, tol_exp, opts.m_max);
    run_with_tol(
        a,
        v,
        t,
        gamma,
        tol_exp,
        budget.tol_sys,
        Algorithm::Inexact,
        Some(budget),
        opts,
    )
}

/// `||y_ref - y_m||_2 / ||y_ref||_2`.
pub fn relative_error(y_ref: &[Complex64], y_m: &[Complex64]) -> Result<f64> {
    let denom = two_norm(y_ref);
    if denom == 0.0 {
        return Err(Error::ZeroReference);
    }
    if y_ref.len() != y_m.len() {
        return Err(Error::DimensionMismatch {
            op: "driver::relative_error",
            expected: y_ref.len(),
            got: y_m.len(),
        });
    }
    let num: f64 = y_ref
        .iter()
        .zip(y_m)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok(num / denom)
}

/// How the reference solution is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceMode {
    /// `small_expm(-t A_dense) v`; needs `n <= cap`.
    DenseExpm,
    /// The exact algorithm driven to `tol_exp = 1e-14`.
    TightArnoldi,
}

pub fn reference_solution(
    a: &ToeplitzMatrix,
    v: &[Complex64],
    t: f64,
    gamma: f64,
    mode: ReferenceMode,
    cap: usize,
) -> Result<Vec<Complex64>> {
    match mode {
        ReferenceMode::DenseExpm => {
            let mut dense = a.to_dense(cap)?;
            dense.scale(Complex64::new(-t, 0.0));
            Ok(small_expm(&dense).matvec(v))
        }
        ReferenceMode::TightArnoldi => {
            let opts = RunOptions {
                m_max: 200,
                keep_basis: false,
                gmres_max_iter: None,
            };
            let rep = run_exact(a, v, t, gamma, 1e-14, &opts)?;
            Ok(rep.expm.y)
        }
    }
}

/// `||r_real - r_comp||_2` where `r_real = -A y_m - V_m u'_m` uses an
/// explicit Toeplitz matvec with A, and `r_comp` is the recurrence residual
/// vector. The run must have retained its basis.
pub fn residual_gap(a: &ToeplitzMatrix, expm: &ExpmResult, gamma: f64) -> Result<f64> {
    let basis = expm.basis.as_ref().ok_or(Error::DimensionMismatch {
        op: "driver::residual_gap (run without keep_basis)",
        expected: 1,
        got: 0,
    })?;
    let n = expm.y.len();
    let m = expm.m;

    // r_real = -A y - V du
    let ay = a.matvec(&expm.y)?;
    let mut r_real: Vec<Complex64> = ay.iter().map(|x| -x).collect();
    for (vi, dui) in basis.v.iter().take(m).zip(&basis.du) {
        for (r, vk) in r_real.iter_mut().zip(vi) {
            *r -= dui * vk;
        }
    }

    // r_comp = (h_{m+1,m}/gamma) (e_m^T H^{-1} u) (I + gamma A) v_{m+1}
    let mut r_comp = vec![Complex64::new(0.0, 0.0); n];
    if !expm.breakdown {
        let scalar = basis.h_inv_u_last * (basis.h_next / gamma);
        let shifted = a.shifted(gamma);
        let tv = shifted.matvec(&basis.v[m])?;
        for (r, x) in r_comp.iter_mut().zip(&tv) {
            *r = scalar * x;
        }
    }

    let diff: Vec<Complex64> = r_real.iter().zip(&r_comp).map(|(a, b)| a - b).collect();
    Ok(two_norm(&diff))
}

/// Builds the test matrix for a given dimension (symbol-generated in the
/// experiment sweeps, a fixed loaded matrix for file-driven runs).
pub type MatrixSource<'a> = dyn Fn(usize) -> ToeplitzMatrix + Sync + 'a;

pub fn symbol_source(kind: SymbolKind) -> impl Fn(usize) -> ToeplitzMatrix + Sync {
    move |n| ToeplitzMatrix::from_symbol(&SymbolSpec::new(kind), n)
}

/// One row of the exact-vs-inexact comparison table.
#[derive(Debug, Clone)]
pub struct BenchRow {
    pub n: usize,
    pub algorithm: Algorithm,
    pub tol_sys: f64,
    pub m: usize,
    pub gsf_iterations: (usize, usize),
    pub error: Option<f64>,
    pub timings: PhaseTimings,
}

/// Run both algorithms over `n_list`; with `verify` the error column is
/// filled against a dense-exponential reference when it fits under `cap`,
/// otherwise against the tightly converged exact algorithm.
pub fn bench_table(
    source: &MatrixSource,
    n_list: &[usize],
    t: f64,
    gamma: f64,
    tol_exp: f64,
    verify: bool,
    cap: usize,
) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for &n in n_list {
        let a = source(n);
        let v = vec![Complex64::new(1.0, 0.0); n];
        let opts = RunOptions::default();
        let exact = run_exact(&a, &v, t, gamma, tol_exp, &opts)?;
        let inexact = run_inexact(&a, &v, t, gamma, tol_exp, &opts)?;
        let reference = if verify {
            let mode = if n <= cap {
                ReferenceMode::DenseExpm
            } else {
                ReferenceMode::TightArnoldi
            };
            Some(reference_solution(&a, &v, t, gamma, mode, cap)?)
        } else {
            None
        };
        for rep in [exact, inexact] {
            let error = reference
                .as_ref()
                .map(|r| relative_error(r, &rep.expm.y))
                .transpose()?;
            rows.push(BenchRow {
                n,
                algorithm: rep.algorithm,
                tol_sys: rep.tol_sys,
                m: rep.expm.m,
                gsf_iterations: rep.gsf_iterations,
                error,
                timings: rep.timings,
            });
        }
    }
    Ok(rows)
}

/// One row of the residual-gap sweep.
#[derive(Debug, Clone)]
pub struct GapRow {
    pub tol_exp: f64,
    pub tol_sys: f64,
    pub gap: f64,
    pub error: f64,
    pub m: usize,
    pub assumption_ratio: Option<f64>,
}

/// Sweep `tol_exp` for the inexact algorithm at fixed n, measuring the
/// real-vs-computed residual gap and the error against a tight reference.
pub fn gap_sweep(
    source: &MatrixSource,
    n: usize,
    t: f64,
    gamma: f64,
    tol_exp_list: &[f64],
    cap: usize,
) -> Result<Vec<GapRow>> {
    let a = source(n);
    let v = vec![Complex64::new(1.0, 0.0); n];
    let mode = if n <= cap.min(512) {
        ReferenceMode::DenseExpm
    } else {
        ReferenceMode::TightArnoldi
    };
    let reference = reference_solution(&a, &v, t, gamma, mode, cap)?;
    let mut rows = Vec::new();
    for &tol_exp in tol_exp_list {
        let opts = RunOptions {
            keep_basis: true,
            ..RunOptions::default()
        };
        let rep = run_inexact(&a, &v, t, gamma, tol_exp, &opts)?;
        let gap = residual_gap(&a, &rep.expm, gamma)?;
        rows.push(GapRow {
            tol_exp,
            tol_sys: rep.tol_sys,
            gap,
            error: relative_error(&reference, &rep.expm.y)?,
            m: rep.expm.m,
            assumption_ratio: rep.assumption_ratio,
        });
    }
    Ok(rows)
}

/// One row of the condition-number table.
#[derive(Debug, Clone)]
pub struct ConditionRow {
    pub n: usize,
    pub numbers: ConditionNumbers,
    pub gsf_iterations: (usize, usize),
    pub cpu_gsf: f64,
    /// Exact `kappa_1` from the dense inverse, when it fits under the cap.
    pub kappa_dense: Option<f64>,
    pub cpu_dense: Option<f64>,
}

/// GSF condition numbers (plus the dense classical value when feasible).
pub fn condition_table(
    source: &MatrixSource,
    n_list: &[usize],
    gamma: f64,
    mode: NormMode,
    with_dense: bool,
    cap: usize,
    tol_sys: f64,
) -> Result<Vec<ConditionRow>> {
    let mut rows = Vec::new();
    for &n in n_list {
        let shifted = source(n).shifted(gamma);
        let t0 = Instant::now();
        let gsf = GsfInverse::build(&shifted, tol_sys, None)?;
        let numbers = gsf.condition_numbers(&shifted, mode);
        let cpu_gsf = t0.elapsed().as_secs_f64();
        let (kappa_dense, cpu_dense) = if with_dense && n <= cap {
            let t1 = Instant::now();
            let inv_norm = shifted.to_dense(cap)?.lu()?.inverse().one_norm();
            let kappa = shifted.one_norm() * inv_norm;
            (Some(kappa), Some(t1.elapsed().as_secs_f64()))
        } else {
            (None, None)
        };
        rows.push(ConditionRow {
            n,
            numbers,
            gsf_iterations: gsf.solve_iterations(),
            cpu_gsf,
            kappa_dense,
            cpu_dense,
        });
    }
    Ok(rows)
}

/// One row of the bound-comparison table.
#[derive(Debug, Clone)]
pub struct BoundsRow {
    pub seed: u64,
    pub report: BoundReport,
}

/// Evaluate GSF stability bounds, the Gutknecht-Hochbruck comparison, and
/// dense-oracle truth over the (n, eps, seed) grid. Fundamental solutions
/// come from preconditioned GMRES at 1e-14; perturbation directions are
/// normalized in the 1-norm so the bound hypothesis holds exactly.
pub fn bounds_table(
    source: &MatrixSource,
    n_list: &[usize],
    eps_list: &[f64],
    seeds: &[u64],
    gamma: f64,
    cap: usize,
) -> Result<Vec<BoundsRow>> {
    let mut rows = Vec::new();
    for &n in n_list {
        let shifted = source(n).shifted(gamma);
        let gsf = GsfInverse::build(&shifted, TOL_SYS_EXACT, None)?;
        let oracle = DenseInverseOracle::new(&shifted, cap)?;
        let cells: Vec<(f64, u64)> = eps_list
            .iter()
            .flat_map(|&e| seeds.iter().map(move |&s| (e, s)))
            .collect();
        let mut cell_rows = par::try_map_indexed(cells.len(), |i| -> Result<BoundsRow> {
            let (eps, seed) = cells[i];
            let spec = PerturbationSpec::new(eps, NormKind::OneNorm, seed);
            let report = evaluate_bounds(&shifted, gsf.x(), gsf.y(), &spec, &oracle)?;
            Ok(BoundsRow { seed, report })
        })?;
        rows.append(&mut cell_rows);
    }
    Ok(rows)
}

/// Dense reference for expm tests: `small_expm(-t A) v` without the cap
/// plumbing (callers pass an explicit dense matrix).
pub fn dense_expm_apply(a_dense: &DenseMatrix, v: &[Complex64], t: f64) -> Vec<Complex64> {
    let mut m = a_dense.clone();
    m.scale(Complex64::new(-t, 0.0));
    small_expm(&m).matvec(v)
}
