use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "relent", version, about = "Monotone relative entropies of operators 0 <= A, B <= 1")]
pub struct Cli {
    /// Largest accepted matrix dimension.
    #[arg(long, env = "ENTROPY_MAX_DIM", default_value_t = 200, global = true)]
    pub max_dim: usize,

    /// Report destination; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Entropy of a pair by all three formulas.
    Compute(ComputeArgs),
    /// Entropies along a projection chain.
    Converge(ConvergeArgs),
    /// Random contraction trials, or a counterexample search.
    Trials(TrialsArgs),
    /// Check a Loewner representation against closed-form φ and φ'.
    Repcheck(RepcheckArgs),
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct PhiArgs {
    /// Built-in φ: fermionic, bosonic, power2, quartic or atom(λ).
    #[arg(long)]
    pub phi: Option<String>,
    /// φ specification file (JSON).
    #[arg(long)]
    pub phi_file: Option<PathBuf>,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

#[derive(Args, Debug, Clone)]
pub struct TolArgs {
    #[arg(long, default_value_t = 1e-9, value_parser = positive)]
    pub tol_lambda: f64,
    #[arg(long, default_value_t = 1e-9, value_parser = positive)]
    pub tol_t: f64,
    /// Boundary-kernel agreement tolerance on ‖(A-B)ψ‖.
    #[arg(long, default_value_t = 1e-10, value_parser = positive)]
    pub tol_agree: f64,
}

#[derive(Args, Debug)]
pub struct ComputeArgs {
    #[command(flatten)]
    pub phi: PhiArgs,
    /// Matrix A (JSON, or CSV when the name ends in .csv).
    #[arg(long)]
    pub a: PathBuf,
    /// Matrix B.
    #[arg(long)]
    pub b: PathBuf,
    #[command(flatten)]
    pub tol: TolArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ChainKind {
    Prefix,
    Random,
}

#[derive(Args, Debug)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub phi: PhiArgs,
    /// Matrix A on the ambient space; with --b, replaces --ambient.
    #[arg(long, requires = "b")]
    pub a: Option<PathBuf>,
    #[arg(long, requires = "a")]
    pub b: Option<PathBuf>,
    /// Ambient dimension of a seeded random interior pair.
    #[arg(long, conflicts_with = "a", required_unless_present = "a")]
    pub ambient: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = ChainKind::Prefix)]
    pub chain: ChainKind,
    /// Comma-separated ranks; defaults to 1..=dim.
    #[arg(long, value_delimiter = ',')]
    pub ranks: Option<Vec<usize>>,
    /// Explicit chain: a JSON array of projector matrices.
    #[arg(long, conflicts_with_all = ["chain", "ranks"])]
    pub chain_file: Option<PathBuf>,
    #[command(flatten)]
    pub tol: TolArgs,
}

#[derive(Args, Debug)]
pub struct TrialsArgs {
    #[command(flatten)]
    pub phi: PhiArgs,
    #[arg(long)]
    pub trials: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 4)]
    pub dim_a: usize,
    #[arg(long, default_value_t = 3)]
    pub dim_b: usize,
    /// Accepted excess of H(XAX*, XBX*) over H(A,B).
    #[arg(long, default_value_t = 1e-9, value_parser = positive)]
    pub tol: f64,
    /// Search for a violation instead (dimensions 2 and 3, threshold 1e-6).
    #[arg(long)]
    pub counterexample: bool,
}

#[derive(Args, Debug)]
pub struct RepcheckArgs {
    #[command(flatten)]
    pub phi: PhiArgs,
    #[arg(long, default_value_t = 101)]
    pub grid: usize,
    #[arg(long, default_value_t = 1e-8, value_parser = positive)]
    pub tol: f64,
}
