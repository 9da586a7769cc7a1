//! Subcommand implementations.

use std::path::Path;

use serde::Serialize;

use toeplitz_expm::dense::two_norm;
use toeplitz_expm::Complex64;
use toeplitz_expm::driver::{
    bench_table, bounds_table, condition_table, gap_sweep as gap_sweep_rows, relative_error,
    reference_solution, residual_gap, run_exact, run_inexact, MatrixSource, PhaseTimings,
    ReferenceMode, RunOptions,
};
use toeplitz_expm::error::Result;
use toeplitz_expm::gsf::NormMode;

use crate::output::{num, opt_num, write_csv, write_json, writer};
use crate::{FormatArg, OutputArgs};

fn timing(t: &PhaseTimings, strip: bool) -> PhaseTimings {
    if strip {
        PhaseTimings::default()
    } else {
        *t
    }
}

fn opt_timing(v: f64, strip: bool) -> f64 {
    if strip {
        0.0
    } else {
        v
    }
}

#[derive(Serialize)]
struct TimingsOut {
    solve_systems_s: f64,
    arnoldi_s: f64,
    total_s: f64,
}

impl From<PhaseTimings> for TimingsOut {
    fn from(t: PhaseTimings) -> Self {
        Self {
            solve_systems_s: t.solve_systems,
            arnoldi_s: t.arnoldi,
            total_s: t.total,
        }
    }
}

#[derive(Serialize)]
struct BudgetOut {
    tol_exp: f64,
    tol_sys: f64,
    m_cap: usize,
    norm_factor: f64,
}

#[derive(Serialize)]
struct ExpmReportOut {
    n: usize,
    algorithm: &'static str,
    t: f64,
    gamma: f64,
    tol_exp: f64,
    tol_sys: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    budget: Option<BudgetOut>,
    m: usize,
    converged: bool,
    breakdown: bool,
    final_residual: f64,
    gmres_iterations: (usize, usize),
    y_norm2: f64,
    y_head: Vec<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    relative_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual_gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    assumption_ratio: Option<f64>,
    timings: TimingsOut,
}

#[allow(clippy::too_many_arguments)]
pub fn expm(
    source: &MatrixSource,
    n: usize,
    t: f64,
    gamma: f64,
    tol_exp: f64,
    exact: bool,
    verify: bool,
    export_matrix: Option<&Path>,
    cap: usize,
    out: &OutputArgs,
) -> Result<()> {
    let a = source(n);
    if let Some(path) = export_matrix {
        toeplitz_expm::io::write_matrix_file(path, &a)?;
    }
    let v: Vec<Complex64> = vec![Complex64::new(1.0, 0.0); n];
    let opts = RunOptions {
        keep_basis: verify,
        ..RunOptions::default()
    };
    let mut rep = if exact {
        run_exact(&a, &v, t, gamma, tol_exp, &opts)?
    } else {
        run_inexact(&a, &v, t, gamma, tol_exp, &opts)?
    };
    if verify {
        let mode = if n <= cap {
            ReferenceMode::DenseExpm
        } else {
            ReferenceMode::TightArnoldi
        };
        let reference = reference_solution(&a, &v, t, gamma, mode, cap)?;
        rep.relative_error = Some(relative_error(&reference, &rep.expm.y)?);
        rep.residual_gap = Some(residual_gap(&a, &rep.expm, gamma)?);
    }

    let report = ExpmReportOut {
        n,
        algorithm: rep.algorithm.name(),
        t,
        gamma,
        tol_exp,
        tol_sys: rep.tol_sys,
        budget: rep.budget.map(|b| BudgetOut {
            tol_exp: b.tol_exp,
            tol_sys: b.tol_sys,
            m_cap: b.m_cap,
            norm_factor: b.norm_factor,
        }),
        m: rep.expm.m,
        converged: rep.expm.converged,
        breakdown: rep.expm.breakdown,
        final_residual: rep.expm.residual_history.last().copied().unwrap_or(0.0),
        gmres_iterations: rep.gsf_iterations,
        y_norm2: two_norm(&rep.expm.y),
        y_head: rep
            .expm
            .y
            .iter()
            .take(4)
            .map(|c| [c.re, c.im])
            .collect(),
        relative_error: rep.relative_error,
        residual_gap: rep.residual_gap,
        assumption_ratio: rep.assumption_ratio,
        timings: timing(&rep.timings, out.no_timings).into(),
    };
    let mut w = writer(&out.output)?;
    match out.format.unwrap_or(FormatArg::Json) {
        FormatArg::Json => write_json(&mut w, &report)?,
        FormatArg::Csv => {
            let header = [
                "n",
                "algorithm",
                "tol_exp",
                "tol_sys",
                "m",
                "converged",
                "final_residual",
                "y_norm2",
                "error",
                "gap",
                "cpu_solve",
                "cpu_arnoldi",
                "cpu_total",
            ];
            let row = vec![
                report.n.to_string(),
                report.algorithm.to_string(),
                num(report.tol_exp),
                num(report.tol_sys),
                report.m.to_string(),
                report.converged.to_string(),
                num(report.final_residual),
                num(report.y_norm2),
                opt_num(report.relative_error),
                opt_num(report.residual_gap),
                num(report.timings.solve_systems_s),
                num(report.timings.arnoldi_s),
                num(report.timings.total_s),
            ];
            write_csv(&mut w, &header, &[row])?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct ConditionRowOut {
    n: usize,
    kappa_gsf: f64,
    kappa_eff_rhs: f64,
    kappa_eff_sol_est: f64,
    t_norm: f64,
    norm_mode: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    kappa_dense: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ratio_gsf_to_dense: Option<f64>,
    gmres_iterations: (usize, usize),
    cpu_gsf_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    cpu_dense_s: Option<f64>,
}

#[allow(clippy::too_many_arguments)]
pub fn condition(
    source: &MatrixSource,
    n_list: &[usize],
    gamma: f64,
    mode: NormMode,
    with_dense: bool,
    cap: usize,
    tol_sys: f64,
    out: &OutputArgs,
) -> Result<()> {
    let rows = condition_table(source, n_list, gamma, mode, with_dense, cap, tol_sys)?;
    let mode_name = match mode {
        NormMode::Exact1Norm => "exact",
        NormMode::ColRowProxy => "proxy",
    };
    let rows_out: Vec<ConditionRowOut> = rows
        .iter()
        .map(|r| ConditionRowOut {
            n: r.n,
            kappa_gsf: r.numbers.kappa_gsf,
            kappa_eff_rhs: r.numbers.kappa_eff_rhs,
            kappa_eff_sol_est: r.numbers.kappa_eff_sol_est,
            t_norm: r.numbers.t_norm,
            norm_mode: mode_name,
            kappa_dense: r.kappa_dense,
            ratio_gsf_to_dense: r.kappa_dense.map(|k| r.numbers.kappa_gsf / k),
            gmres_iterations: r.gsf_iterations,
            cpu_gsf_s: opt_timing(r.cpu_gsf, out.no_timings),
            cpu_dense_s: r.cpu_dense.map(|v| opt_timing(v, out.no_timings)),
        })
        .collect();
    let mut w = writer(&out.output)?;
    match out.format.unwrap_or(FormatArg::Json) {
        FormatArg::Json => write_json(&mut w, &rows_out)?,
        FormatArg::Csv => {
            let header = [
                "n",
                "kappa_dense",
                "kappa_gsf",
                "ratio",
                "kappa_eff_rhs",
                "kappa_eff_sol_est",
                "norm_mode",
                "iters_x",
                "iters_y",
                "cpu_gsf",
                "cpu_dense",
            ];
            let body: Vec<Vec<String>> = rows_out
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        opt_num(r.kappa_dense),
                        num(r.kappa_gsf),
                        opt_num(r.ratio_gsf_to_dense),
                        num(r.kappa_eff_rhs),
                        num(r.kappa_eff_sol_est),
                        r.norm_mode.to_string(),
                        r.gmres_iterations.0.to_string(),
                        r.gmres_iterations.1.to_string(),
                        num(r.cpu_gsf_s),
                        opt_num(r.cpu_dense_s),
                    ]
                })
                .collect();
            write_csv(&mut w, &header, &body)?;
        }
    }
    Ok(())
}

pub fn bounds(
    source: &MatrixSource,
    n_list: &[usize],
    eps_list: &[f64],
    seeds: &[u64],
    gamma: f64,
    cap: usize,
    out: &OutputArgs,
) -> Result<()> {
    let rows = bounds_table(source, n_list, eps_list, seeds, gamma, cap)?;
    let header = [
        "n",
        "eps",
        "seed",
        "eps_tilde",
        "new_abs_2norm",
        "gh_abs_2norm",
        "true_abs_2norm",
        "new_rel_2norm",
        "gh_rel_2norm",
        "true_rel_2norm",
        "new_abs_1norm",
        "new_rel_1norm",
        "true_abs_1norm",
        "true_rel_1norm",
    ];
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let b = &r.report;
            vec![
                b.n.to_string(),
                num(b.eps),
                r.seed.to_string(),
                num(b.eps_tilde),
                num(b.abs_bound_2norm),
                num(b.gh_abs_bound_2norm),
                num(b.true_abs_2norm),
                num(b.rel_bound_2norm),
                num(b.gh_rel_bound_2norm),
                num(b.true_rel_2norm),
                num(b.abs_bound_1norm),
                num(b.rel_bound_1norm),
                num(b.true_abs_1norm),
                num(b.true_rel_1norm),
            ]
        })
        .collect();
    let mut w = writer(&out.output)?;
    match out.format.unwrap_or(FormatArg::Csv) {
        FormatArg::Csv => write_csv(&mut w, &header, &body)?,
        FormatArg::Json => {
            #[derive(Serialize)]
            struct BoundsRowOut {
                n: usize,
                eps: f64,
                seed: u64,
                eps_tilde: f64,
                new_abs_2norm: f64,
                gh_abs_2norm: f64,
                true_abs_2norm: f64,
                new_rel_2norm: f64,
                gh_rel_2norm: f64,
                true_rel_2norm: f64,
                new_abs_1norm: f64,
                new_rel_1norm: f64,
                true_abs_1norm: f64,
                true_rel_1norm: f64,
            }
            let rows_out: Vec<BoundsRowOut> = rows
                .iter()
                .map(|r| {
                    let b = &r.report;
                    BoundsRowOut {
                        n: b.n,
                        eps: b.eps,
                        seed: r.seed,
                        eps_tilde: b.eps_tilde,
                        new_abs_2norm: b.abs_bound_2norm,
                        gh_abs_2norm: b.gh_abs_bound_2norm,
                        true_abs_2norm: b.true_abs_2norm,
                        new_rel_2norm: b.rel_bound_2norm,
                        gh_rel_2norm: b.gh_rel_bound_2norm,
                        true_rel_2norm: b.true_rel_2norm,
                        new_abs_1norm: b.abs_bound_1norm,
                        new_rel_1norm: b.rel_bound_1norm,
                        true_abs_1norm: b.true_abs_1norm,
                        true_rel_1norm: b.true_rel_1norm,
                    }
                })
                .collect();
            write_json(&mut w, &rows_out)?;
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn bench(
    source: &MatrixSource,
    n_list: &[usize],
    t: f64,
    gamma: f64,
    tol_exp: f64,
    verify: bool,
    cap: usize,
    out: &OutputArgs,
) -> Result<()> {
    let rows = bench_table(source, n_list, t, gamma, tol_exp, verify, cap)?;
    let header = [
        "n",
        "algorithm",
        "tol_sys",
        "m",
        "iters_x",
        "iters_y",
        "error",
        "cpu_solve",
        "cpu_arnoldi",
        "cpu_total",
    ];
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let tm = timing(&r.timings, out.no_timings);
            vec![
                r.n.to_string(),
                r.algorithm.name().to_string(),
                num(r.tol_sys),
                r.m.to_string(),
                r.gsf_iterations.0.to_string(),
                r.gsf_iterations.1.to_string(),
                opt_num(r.error),
                num(tm.solve_systems),
                num(tm.arnoldi),
                num(tm.total),
            ]
        })
        .collect();
    let mut w = writer(&out.output)?;
    match out.format.unwrap_or(FormatArg::Csv) {
        FormatArg::Csv => write_csv(&mut w, &header, &body)?,
        FormatArg::Json => {
            #[derive(Serialize)]
            struct BenchRowOut {
                n: usize,
                algorithm: &'static str,
                tol_sys: f64,
                m: usize,
                gmres_iterations: (usize, usize),
                #[serde(skip_serializing_if = "Option::is_none")]
                error: Option<f64>,
                timings: TimingsOut,
            }
            let rows_out: Vec<BenchRowOut> = rows
                .iter()
                .map(|r| BenchRowOut {
                    n: r.n,
                    algorithm: r.algorithm.name(),
                    tol_sys: r.tol_sys,
                    m: r.m,
                    gmres_iterations: r.gsf_iterations,
                    error: r.error,
                    timings: timing(&r.timings, out.no_timings).into(),
                })
                .collect();
            write_json(&mut w, &rows_out)?;
        }
    }
    Ok(())
}

pub fn gap_sweep(
    source: &MatrixSource,
    n: usize,
    t: f64,
    gamma: f64,
    tol_exp_list: &[f64],
    cap: usize,
    out: &OutputArgs,
) -> Result<()> {
    let rows = gap_sweep_rows(source, n, t, gamma, tol_exp_list, cap)?;
    let header = ["tol_exp", "tol_sys", "gap", "error", "m", "assumption_ratio"];
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                num(r.tol_exp),
                num(r.tol_sys),
                num(r.gap),
                num(r.error),
                r.m.to_string(),
                opt_num(r.assumption_ratio),
            ]
        })
        .collect();
    let mut w = writer(&out.output)?;
    match out.format.unwrap_or(FormatArg::Csv) {
        FormatArg::Csv => write_csv(&mut w, &header, &body)?,
        FormatArg::Json => {
            #[derive(Serialize)]
            struct GapRowOut {
                tol_exp: f64,
                tol_sys: f64,
                gap: f64,
                error: f64,
                m: usize,
                #[serde(skip_serializing_if = "Option::is_none")]
                assumption_ratio: Option<f64>,
            }
            let rows_out: Vec<GapRowOut> = rows
                .iter()
                .map(|r| GapRowOut {
                    tol_exp: r.tol_exp,
                    tol_sys: r.tol_sys,
                    gap: r.gap,
                    error: r.error,
                    m: r.m,
                    assumption_ratio: r.assumption_ratio,
                })
                .collect();
            write_json(&mut w, &rows_out)?;
        }
    }
    Ok(())
}
