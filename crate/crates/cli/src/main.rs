//! `toexpm`: Toeplitz matrix exponential toolkit.
//!
//! Subcommands mirror the experiment tables: `expm` (one exponential-vector
//! product), `condition` (GSF vs classical condition numbers), `bounds`
//! (stability-bound comparison), `bench` (exact vs inexact algorithm), and
//! `gap-sweep` (real-vs-computed residual gap across tolerances).

mod output;
mod runs;

use clap::{Args, Parser, Subcommand, ValueEnum};
use toeplitz_expm::gsf::NormMode;
use toeplitz_expm::{SymbolKind, ToeplitzMatrix, DENSE_CAP_DEFAULT};

#[derive(Parser)]
#[command(
    name = "toexpm",
    about = "Toeplitz matrix exponential via shift-and-invert Arnoldi with a Gohberg-Semencul inverse",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SymbolArg {
    /// f(theta) = theta^2 (real symmetric)
    Theta2,
    /// f(theta) = theta^2 + i theta^3 (real non-symmetric)
    #[value(name = "theta2-itheta3")]
    Theta2ITheta3,
    /// entries 1/(i - j + 1/2)
    Parter,
}

impl SymbolArg {
    fn kind(self) -> SymbolKind {
        match self {
            SymbolArg::Theta2 => SymbolKind::ThetaSquared,
            SymbolArg::Theta2ITheta3 => SymbolKind::ThetaSquaredPlusICubed,
            SymbolArg::Parter => SymbolKind::Parter,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormModeArg {
    /// max(||fcol||_1, ||frow||_1)
    Proxy,
    /// exact induced 1-norm
    Exact,
}

impl NormModeArg {
    fn mode(self) -> NormMode {
        match self {
            NormModeArg::Proxy => NormMode::ColRowProxy,
            NormModeArg::Exact => NormMode::Exact1Norm,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Exact,
    Inexact,
}

/// Matrix selection shared by all subcommands.
#[derive(Args)]
struct MatrixArgs {
    /// Generator symbol for the test matrix A.
    #[arg(long, value_enum, conflicts_with = "matrix_file")]
    symbol: Option<SymbolArg>,
    /// FFT grid size for the symbol's Fourier-coefficient quadrature
    /// (rounded up to a power of two; default 8n, floor 4n).
    #[arg(long, conflicts_with = "matrix_file")]
    quadrature: Option<usize>,
    /// Read A from a text file (line 1: n; then n lines `re im` for the
    /// first column and n lines for the first row).
    #[arg(long)]
    matrix_file: Option<std::path::PathBuf>,
}

type MatrixSourceBox = Box<dyn Fn(usize) -> ToeplitzMatrix + Sync>;

impl MatrixArgs {
    /// Source closure plus the file-fixed dimension, if any.
    fn resolve(&self) -> Result<(MatrixSourceBox, Option<usize>), toeplitz_expm::Error> {
        if let Some(path) = &self.matrix_file {
            let m = toeplitz_expm::io::read_matrix_file(path)?;
            let n = m.n();
            let source: MatrixSourceBox = Box::new(move |req: usize| {
                assert_eq!(req, n, "matrix file fixes the dimension");
                m.clone()
            });
            return Ok((source, Some(n)));
        }
        let kind = self.symbol.unwrap_or(SymbolArg::Theta2).kind();
        let quadrature = self.quadrature;
        Ok((
            Box::new(move |n| {
                let spec = match quadrature {
                    Some(q) => toeplitz_expm::SymbolSpec::with_quadrature(kind, q),
                    None => toeplitz_expm::SymbolSpec::new(kind),
                };
                ToeplitzMatrix::from_symbol(&spec, n)
            }),
            None,
        ))
    }
}

#[derive(Args)]
pub struct OutputArgs {
    /// Report format (default depends on the subcommand).
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<std::path::PathBuf>,
    /// Zero every timing field, for byte-reproducible reports.
    #[arg(long)]
    no_timings: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Compute y(t) = exp(-t A) v for v = (1, .., 1) and report the run.
    Expm {
        #[command(flatten)]
        matrix: MatrixArgs,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, default_value_t = 0.1)]
        gamma: f64,
        #[arg(long, default_value_t = 1e-6)]
        tol_exp: f64,
        #[arg(long, value_enum, default_value = "inexact")]
        algorithm: AlgorithmArg,
        /// Also compute a reference solution, the relative error, and the
        /// real-vs-computed residual gap.
        #[arg(long)]
        verify: bool,
        /// Export the constructed matrix in the text format.
        #[arg(long)]
        export_matrix: Option<std::path::PathBuf>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// GSF condition number table (plus dense classical kappa_1 under the cap).
    Condition {
        #[command(flatten)]
        matrix: MatrixArgs,
        #[arg(long, value_delimiter = ',')]
        n: Vec<usize>,
        #[arg(long, default_value_t = 0.1)]
        gamma: f64,
        #[arg(long, value_enum, default_value = "proxy")]
        norm_mode: NormModeArg,
        /// Tolerance for the two fundamental solves.
        #[arg(long, default_value_t = 1e-14)]
        tol_sys: f64,
        /// Skip the dense classical condition number.
        #[arg(long)]
        no_dense: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Stability-bound comparison over an (n, eps, seed) grid.
    Bounds {
        #[command(flatten)]
        matrix: MatrixArgs,
        #[arg(long, value_delimiter = ',')]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        eps: Vec<f64>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Number of consecutive seeds per (n, eps) cell.
        #[arg(long, default_value_t = 1)]
        seeds_per_cell: u64,
        #[arg(long, default_value_t = 0.1)]
        gamma: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Exact vs inexact algorithm comparison (tol_sys, error, CPU).
    Bench {
        #[command(flatten)]
        matrix: MatrixArgs,
        #[arg(long, value_delimiter = ',')]
        n: Vec<usize>,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, default_value_t = 0.1)]
        gamma: f64,
        #[arg(long, default_value_t = 1e-6)]
        tol_exp: f64,
        /// Fill the error column against a reference solution.
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Residual-gap sweep over tol_exp for the inexact algorithm.
    GapSweep {
        #[command(flatten)]
        matrix: MatrixArgs,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, default_value_t = 0.1)]
        gamma: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        tol_exp: Vec<f64>,
        #[command(flatten)]
        out: OutputArgs,
    },
}

/// Dense-materialization guard, overridable through the environment.
fn dense_cap() -> usize {
    std::env::var("TOEXPM_DENSE_CAP")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DENSE_CAP_DEFAULT)
}

fn require_n(list: &[usize], flag: &str) -> Result<(), toeplitz_expm::Error> {
    if list.is_empty() {
        // clap cannot express "required unless --matrix-file"; enforce here.
        eprintln!("error: {flag} requires --n (or --matrix-file)");
        std::process::exit(2);
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<(), toeplitz_expm::Error> {
    let cap = dense_cap();
    match cli.command {
        Command::Expm {
            matrix,
            n,
            t,
            gamma,
            tol_exp,
            algorithm,
            verify,
            export_matrix,
            out,
        } => {
            let (source, fixed_n) = matrix.resolve()?;
            let n = fixed_n.or(n).unwrap_or(256);
            runs::expm(
                &source,
                n,
                t,
                gamma,
                tol_exp,
                matches!(algorithm, AlgorithmArg::Exact),
                verify,
                export_matrix.as_deref(),
                cap,
                &out,
            )
        }
        Command::Condition {
            matrix,
            n,
            gamma,
            norm_mode,
            tol_sys,
            no_dense,
            out,
        } => {
            let (source, fixed_n) = matrix.resolve()?;
            let n_list = fixed_n.map(|v| vec![v]).unwrap_or(n);
            require_n(&n_list, "condition")?;
            runs::condition(
                &source,
                &n_list,
                gamma,
                norm_mode.mode(),
                !no_dense,
                cap,
                tol_sys,
                &out,
            )
        }
        Command::Bounds {
            matrix,
            n,
            eps,
            seed,
            seeds_per_cell,
            gamma,
            out,
        } => {
            let (source, fixed_n) = matrix.resolve()?;
            let n_list = fixed_n.map(|v| vec![v]).unwrap_or(n);
            require_n(&n_list, "bounds")?;
            let seeds: Vec<u64> = (0..seeds_per_cell.max(1)).map(|k| seed + k).collect();
            runs::bounds(&source, &n_list, &eps, &seeds, gamma, cap, &out)
        }
        Command::Bench {
            matrix,
            n,
            t,
            gamma,
            tol_exp,
            verify,
            out,
        } => {
            let (source, fixed_n) = matrix.resolve()?;
            let n_list = fixed_n.map(|v| vec![v]).unwrap_or(n);
            require_n(&n_list, "bench")?;
            runs::bench(&source, &n_list, t, gamma, tol_exp, verify, cap, &out)
        }
        Command::GapSweep {
            matrix,
            n,
            t,
            gamma,
            tol_exp,
            out,
        } => {
            let (source, fixed_n) = matrix.resolve()?;
            let n = fixed_n.or(n).unwrap_or(1000);
            runs::gap_sweep(&source, n, t, gamma, &tol_exp, cap, &out)
        }
    }
}
