//! `tropreg`: batch front-end for tropical regression, system
//! identification, min-plus factorization and the verification oracles.
//!
//! Every command writes a JSON document `{"command", "config", "result",
//! "timing_ms"}` unless it produces a matrix or CSV. Exit codes: 0 success,
//! 1 other failure, 2 malformed input, 3 solver cap exceeded.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tropreg::TropError;

#[derive(Debug, Parser)]
#[command(
    name = "tropreg",
    version,
    about = "Tropical regression and min-plus factorization"
)]
pub struct Cli {
    /// Worker threads for parallel solvers (default: available parallelism).
    #[arg(long, global = true, env = "TROPREG_THREADS")]
    pub threads: Option<usize>,

    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Write the result here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    /// Write `"timing_ms": null` so repeated runs are byte-identical.
    #[arg(long, global = true)]
    pub no_timing: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormArg {
    Inf,
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Newton,
    Steepest,
    Exact,
}

/// Newton solver settings shared by several commands.
#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Random restarts (start 0 is the ∞-norm optimum).
    #[arg(long, default_value_t = 10)]
    pub starts: usize,
    /// Undershooting factor of the first Newton pass.
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    /// Undershooting factor of the polishing pass; 0 disables it.
    #[arg(long, default_value_t = 0.05)]
    pub polish_mu: f64,
    /// Iterations without improvement before a pass stops.
    #[arg(long, default_value_t = 5)]
    pub stall: usize,
    #[arg(long, default_value_t = 500)]
    pub max_iter: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit x in A ⊗ x ≈ y (max-plus).
    Regress {
        matrix: PathBuf,
        target: PathBuf,
        #[arg(long, value_enum, default_value_t = NormArg::Two)]
        norm: NormArg,
        #[arg(long, value_enum, default_value_t = Method::Newton)]
        method: Method,
        /// Sparsity penalty; positive values run IRSLS after Newton.
        #[arg(long, default_value_t = 0.0)]
        lambda: f64,
        /// Start point for steepest descent (comma-separated).
        #[arg(long)]
        x0: Option<String>,
        /// Largest n + d accepted by the exact solver.
        #[arg(long, default_value_t = tropreg::regression::DEFAULT_EXACT_CAP)]
        cap: usize,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Identify A in x(n+1) ≈ A ⊗ x(n) from a CSV orbit (rows = time).
    Sysid {
        series: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        lambda: f64,
        /// Noise level for the reported log-likelihood.
        #[arg(long)]
        sigma: Option<f64>,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Residual (and log-likelihood) of a given system matrix on an orbit.
    Residual {
        matrix: PathBuf,
        series: PathBuf,
        #[arg(long)]
        sigma: Option<f64>,
    },
    /// Low-rank min-plus factorization C ≈ A ⊠ B or C ≈ A ⊠ Aᵀ.
    Factorize {
        matrix: PathBuf,
        #[arg(long)]
        rank: usize,
        #[arg(long)]
        symmetric: bool,
        /// Ignore the diagonal (symmetric mode only).
        #[arg(long)]
        zero_diag: bool,
        #[arg(long, default_value_t = 10)]
        restarts: usize,
        /// Sweep cap (alternating) or outer-iteration cap (symmetric).
        #[arg(long)]
        max_sweeps: Option<usize>,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Rank-d latent factors of a graph's shortest-path distances.
    Netreduce {
        edges: PathBuf,
        #[arg(long, default_value_t = 3)]
        rank: usize,
        #[arg(long, default_value_t = 10)]
        restarts: usize,
        /// Per-vertex feature CSV (default: next to the edge list).
        #[arg(long)]
        features: Option<PathBuf>,
    },
    /// Fit coefficients of a max-plus polynomial with fixed slopes.
    Polyfit {
        points: PathBuf,
        targets: PathBuf,
        slopes: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Simulate x(n+1) = M ⊗ x(n) + noise and write the orbit as CSV.
    Simulate {
        matrix: PathBuf,
        /// Initial state, comma-separated (default: zeros).
        #[arg(long)]
        x0: Option<String>,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[arg(long, default_value_t = 0.0)]
        sigma: f64,
    },
    /// All-pairs shortest paths of an edge list, as a min-plus matrix file.
    Paths { edges: PathBuf },
    /// Brute-force oracles for desk-scale checks.
    Verify {
        #[command(subcommand)]
        check: VerifyCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    /// Exhaustive grid search of the residual (d ≤ 4).
    Grid {
        matrix: PathBuf,
        target: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        lo: f64,
        #[arg(long, allow_hyphen_values = true)]
        hi: f64,
        #[arg(long)]
        step: f64,
        #[arg(long, value_enum, default_value_t = NormArg::Two)]
        norm: NormArg,
    },
    /// Feasible patterns counted by number of classes.
    Census {
        matrix: PathBuf,
        #[arg(long, default_value_t = tropreg::regression::DEFAULT_EXACT_CAP)]
        cap: usize,
    },
    /// Pattern of support at a point, with its feasibility and classes.
    Pattern {
        matrix: PathBuf,
        /// Evaluation point, comma-separated.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        /// Terms within this distance of a row maximum count as ties.
        #[arg(long, default_value_t = 0.0)]
        tie_tol: f64,
    },
    /// Set-cover reduction: descent at 0 versus existence of a k-cover.
    Setcover {
        /// Sets separated by `;`, elements (1-based) by `,`, e.g. "1;2;1,2".
        #[arg(long)]
        family: String,
        #[arg(long)]
        k: usize,
        /// Ground-set size (default: largest element).
        #[arg(long)]
        n: Option<usize>,
    },
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<TropError>()) {
        Some(TropError::Parse(_)) => 2,
        Some(TropError::CapExceeded(_)) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(1);
        }
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
