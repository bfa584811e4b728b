//! `respca` command-line tool.
//!
//! Exit codes: 0 on success, 2 for usage or input errors, 3 when the solver
//! fails numerically.

mod bench;
mod commands;
mod io;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use respca::solver::{Lambda, SolverConfig, SparseNorm};
use respca::Execution;

#[derive(Debug, Parser)]
#[command(name = "respca", version, about = "SVD-free robust PCA")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Split a matrix into low-rank and sparse parts.
    Decompose(DecomposeArgs),
    /// Generate a synthetic low-rank plus sparse problem.
    Synth(SynthArgs),
    /// Time fixed-iteration solves over a sweep of sizes.
    Bench(BenchArgs),
    /// Score columns by the norm of their sparse part.
    Outliers(OutlierArgs),
    /// Background/foreground separation of a PGM frame directory.
    Frames(FramesArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum NormArg {
    L1,
    L21,
}

#[derive(Debug, Args)]
struct SolverArgs {
    /// Number of column groups.
    #[arg(long, short = 'c')]
    groups: usize,
    /// Scatter weight, a positive number or `auto` for sqrt(max(n, d)).
    #[arg(long, default_value = "auto")]
    lambda: String,
    #[arg(long, default_value_t = 1e-4)]
    rho0: f64,
    #[arg(long, default_value_t = 1.5)]
    kappa: f64,
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    #[arg(long, default_value_t = 500)]
    max_iter: usize,
    /// Run exactly this many iterations, ignoring the tolerance.
    #[arg(long)]
    fixed_iters: Option<usize>,
    #[arg(long, value_enum, default_value = "l1")]
    norm: NormArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Disable multi-threaded kernels.
    #[arg(long)]
    sequential: bool,
}

impl SolverArgs {
    fn config(&self) -> Result<SolverConfig, CliError> {
        let lambda = if self.lambda.eq_ignore_ascii_case("auto") {
            Lambda::Auto
        } else {
            let v: f64 = self
                .lambda
                .parse()
                .map_err(|_| CliError::input(format!("invalid --lambda {:?}", self.lambda)))?;
            Lambda::Value(v)
        };
        let mut cfg = SolverConfig::new(self.groups).seed(self.seed);
        cfg.lambda = lambda;
        cfg.rho0 = self.rho0;
        cfg.kappa = self.kappa;
        cfg.tol = self.tol;
        cfg.max_iter = self.max_iter;
        cfg.fixed_iters = self.fixed_iters;
        cfg.sparse_norm = match self.norm {
            NormArg::L1 => SparseNorm::L1,
            NormArg::L21 => SparseNorm::L21,
        };
        cfg.execution = if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
struct DecomposeArgs {
    /// CSV file, binary matrix file, or directory of PGM frames.
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long)]
    out_l: Option<PathBuf>,
    #[arg(long)]
    out_s: Option<PathBuf>,
    /// JSON-lines report; the summary goes to stdout when omitted.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 200)]
    d: usize,
    #[arg(long, default_value_t = 500)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    c: usize,
    #[arg(long, default_value_t = 0.05)]
    sparsity: f64,
    #[arg(long, default_value_t = 1.0)]
    magnitude: f64,
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output files; `.bin` selects the binary format, anything else CSV.
    #[arg(long, default_value = "x.csv")]
    out_x: PathBuf,
    #[arg(long, default_value = "l0.csv")]
    out_l0: PathBuf,
    #[arg(long, default_value = "s0.csv")]
    out_s0: PathBuf,
    /// Group label of every column, one per line.
    #[arg(long, default_value = "labels.csv")]
    out_labels: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepMode {
    /// Vary the number of samples.
    N,
    /// Vary the dimension.
    D,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long, value_enum)]
    mode: SweepMode,
    /// Comma-separated sizes for the swept dimension.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    sizes: Vec<usize>,
    /// Size of the dimension that is held fixed.
    #[arg(long, default_value_t = 500)]
    fixed: usize,
    #[arg(long, default_value_t = 3)]
    c: usize,
    #[arg(long, default_value_t = 10)]
    repeats: usize,
    #[arg(long, default_value_t = 30)]
    iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    sequential: bool,
    /// CSV output; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OutlierArgs {
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    solver: SolverArgs,
    /// Flag columns whose score is at least this value.
    #[arg(long)]
    threshold: Option<f64>,
}

#[derive(Debug, Args)]
struct FramesArgs {
    /// Directory of P5 PGM frames.
    #[arg(long)]
    frames: PathBuf,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long)]
    out_background: PathBuf,
    #[arg(long)]
    out_foreground: PathBuf,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug)]
pub(crate) enum CliError {
    Input(String),
    Numerical(String),
}

impl CliError {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<respca::Error> for CliError {
    fn from(e: respca::Error) -> Self {
        if e.is_input_error() {
            CliError::Input(e.to_string())
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) | CliError::Numerical(m) => f.write_str(m),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Decompose(args) => commands::decompose(&args),
        Command::Synth(args) => commands::synth(&args),
        Command::Bench(args) => bench::run(&args),
        Command::Outliers(args) => commands::outliers(&args),
        Command::Frames(args) => commands::frames(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
