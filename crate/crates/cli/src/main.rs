use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod fig1;
mod generate;
mod solve;
mod verify;

/// Projection algorithms for phase retrieval: generate instances, run
/// solvers, verify the structure of the RRR objective.
#[derive(Debug, Parser)]
#[command(name = "rrrkit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a random instance as JSON.
    Generate(GenerateArgs),
    /// Run one algorithm on an instance file.
    Solve(SolveArgs),
    /// Run a verifier suite and report pass/fail as JSON.
    Verify(VerifyArgs),
    /// The 80 x 50 real Gaussian experiment with RRR at beta 0.5 and 1.
    Fig1(Fig1Args),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Gaussian,
    Dft,
    Sparse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FieldArg {
    Real,
    Complex,
}

impl From<FieldArg> for rrrkit::Field {
    fn from(f: FieldArg) -> Self {
        match f {
            FieldArg::Real => rrrkit::Field::Real,
            FieldArg::Complex => rrrkit::Field::Complex,
        }
    }
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    /// Number of measurements (gaussian only).
    #[arg(long)]
    pub m: Option<usize>,
    /// Signal length.
    #[arg(long)]
    pub n: usize,
    /// Scalar field (gaussian only; dft and sparse are complex). Default real.
    #[arg(long, value_enum)]
    pub field: Option<FieldArg>,
    /// m = oversample * n (dft only).
    #[arg(long, default_value_t = 2)]
    pub oversample: usize,
    /// Number of nonzero atoms (sparse only).
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, env = "RRRKIT_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Output path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub inst: PathBuf,
    /// gs | dr | hio | rrr | raar
    #[arg(long, default_value = "rrr")]
    pub alg: rrrkit::model::Algorithm,
    #[arg(long, default_value_t = 0.5)]
    pub beta: f64,
    #[arg(long, default_value_t = 100_000)]
    pub max_iters: usize,
    /// Relative feasibility tolerance.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Seed of the random initial iterate.
    #[arg(long, env = "RRRKIT_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Trace CSV path.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub trace_every: usize,
    /// Summary JSON path; stdout when absent.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Solutions,
    Convexity,
    Stability,
    Ray,
    Wirtinger,
    Gradcheck,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
    #[arg(long, env = "RRRKIT_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 20)]
    pub m: usize,
    #[arg(long, default_value_t = 6)]
    pub n: usize,
    /// Check this instance instead of generating one per sample.
    #[arg(long)]
    pub inst: Option<PathBuf>,
    /// Report path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Fig1Args {
    #[arg(long, env = "RRRKIT_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = 100_000)]
    pub max_iters: usize,
}

/// Exit code for a failed verification.
const VERIFY_FAILED: u8 = 1;
/// Exit code for bad arguments or unusable inputs.
const USAGE: u8 = 2;

pub fn write_output(path: Option<&PathBuf>, bytes: &[u8]) -> anyhow::Result<()> {
    use std::io::Write;
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| anyhow::anyhow!("cannot write {}: {e}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.write_all(b"\n")?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Generate(a) => generate::run(&a).map(|_| true),
        Command::Solve(a) => solve::run(&a).map(|_| true),
        Command::Verify(a) => verify::run(&a),
        Command::Fig1(a) => fig1::run(&a).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(VERIFY_FAILED),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(USAGE)
        }
    }
}
