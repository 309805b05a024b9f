use std::path::PathBuf;

use blockkrylov::{Kernel, Mode, PreconditionerKind};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "blockkrylov",
    version,
    about = "Block CG solver runs, runtime model sweeps and self-checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve Poisson (or Matrix Market) systems and print one CSV row per batch.
    Solve(SolveArgs),
    /// Predict kernel runtimes for a list of block widths.
    Model(ModelArgs),
    /// Run built-in invariant suites and print a pass/fail table.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    /// Grid cells in x.
    #[arg(long, default_value_t = 32)]
    pub nx: usize,
    /// Grid cells in y.
    #[arg(long, default_value_t = 32)]
    pub ny: usize,
    /// Right-hand sides per batch [default: 8, or the column count of --rhs-file].
    #[arg(long)]
    pub k: Option<usize>,
    /// Block width; must divide k [default: k].
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long, default_value = "hybrid")]
    pub mode: Mode,
    /// identity, jacobi or ilu0.
    #[arg(long, default_value = "ilu0")]
    pub precond: PreconditionerKind,
    /// Per-column relative defect reduction.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Seeds the coefficient field; batch b uses right-hand-side seed `seed + b`.
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Coefficients are 10^u with u uniform in [-contrast, contrast].
    #[arg(long, default_value_t = 2.0)]
    pub contrast: f64,
    /// Number of k-column batches.
    #[arg(long, conflicts_with = "total_rhs")]
    pub repetitions: Option<usize>,
    /// Total right-hand sides; runs total/k batches.
    #[arg(long)]
    pub total_rhs: Option<usize>,
    /// Dense right-hand side block ("n k" header, then n rows of k values).
    #[arg(long, conflicts_with_all = ["repetitions", "total_rhs"])]
    pub rhs_file: Option<PathBuf>,
    /// Symmetric Matrix Market operator instead of the Poisson grid.
    #[arg(long)]
    pub matrix_file: Option<PathBuf>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Fill the wall-clock columns (otherwise left empty so output is reproducible).
    #[arg(long)]
    pub timing: bool,
    /// Timed repetitions per batch; the median is reported.
    #[arg(long, default_value_t = 1, requires = "timing")]
    pub reps: usize,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// bdot, baxpy or bop.
    #[arg(long)]
    pub kernel: Kernel,
    /// Rows of the block vector.
    #[arg(long)]
    pub n: u64,
    /// Columns of the block vector.
    #[arg(long)]
    pub k: u64,
    /// Comma-separated block widths [default: all divisors of k].
    #[arg(long)]
    pub p_list: Option<String>,
    /// Stored nonzeros of the operator (bop only).
    #[arg(long)]
    pub z: Option<u64>,
    /// Machine profile file [default: $BLOCKKRYLOV_MACHINE, else the built-in reference].
    #[arg(long)]
    pub machine: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Equivalence,
    Flops,
    Rates,
    Model,
    All,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
}
