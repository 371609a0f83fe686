use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "iets", version, about = "Certified zeros of exponential systems and towers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a system e^{x_i} = f_i(x) given as system JSON.
    Solve(RunArgs),
    /// Solve p(z, e^z, …) = 0 given as tower JSON, excluding bad relations.
    SolveTower(TowerArgs),
    /// Report whether a tower has the degenerate form g(x)·y_1^{n_1}⋯y_k^{n_k}.
    CheckDegenerate(InputArgs),
    /// List the bad rational relations of a tower.
    BadRelations(BadRelationArgs),
    /// Count zeros of a tower inside a rectangle.
    CountRoots(CountArgs),
    /// Search integer relations among tower values at solved roots, or
    /// among an explicit vector.
    Diagnose(DiagnoseArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Input JSON file; `-` reads standard input.
    pub input: PathBuf,
    /// Write JSON lines here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub io: InputArgs,
    /// Residual tolerance for accepted roots.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Number of distinct roots to find.
    #[arg(long, default_value_t = 3)]
    pub roots: usize,
    /// Height bound for relation diagnostics.
    #[arg(long, default_value_t = 10)]
    pub height: u64,
    /// Decimal digits for rechecks and diagnostics.
    #[arg(long, default_value_t = 30)]
    pub digits: u32,
    /// Largest lattice scale t in the doubling schedule.
    #[arg(long, default_value_t = 1 << 14)]
    pub t_max: u64,
    /// Worker threads for seed solving.
    #[arg(long, env = "IETS_WORKERS")]
    pub workers: Option<usize>,
    /// Write (Re z, Im z, residual) rows as CSV.
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TowerArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Solve the bare chain system without relation exclusions.
    #[arg(long)]
    pub no_exclusions: bool,
}

#[derive(Debug, Args)]
pub struct BadRelationArgs {
    #[command(flatten)]
    pub io: InputArgs,
    /// Height of the tuple scan; defaults to the total degree of p. The scan
    /// visits (2H+1)^k tuples.
    #[arg(long)]
    pub height: Option<u32>,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    #[command(flatten)]
    pub io: InputArgs,
    /// Rectangle as x0,y0,x1,y1.
    #[arg(long, value_delimiter = ',', num_args = 1, allow_hyphen_values = true, required = true)]
    pub region: Vec<f64>,
    /// Deepest rectangle subdivision.
    #[arg(long, default_value_t = 6)]
    pub depth: u32,
    /// Panels per edge before adaptive refinement.
    #[arg(long, default_value_t = 32)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    /// Tower JSON; ignored when --vector is given.
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Explicit values as re:im pairs separated by commas, e.g. 1:0,2:0,3:0.
    #[arg(long)]
    pub vector: Option<String>,
    #[arg(long, default_value_t = 10)]
    pub height: u64,
    #[arg(long, default_value_t = 30)]
    pub digits: u32,
    #[arg(long, default_value_t = 1)]
    pub roots: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, default_value_t = 1 << 14)]
    pub t_max: u64,
    #[arg(long, env = "IETS_WORKERS")]
    pub workers: Option<usize>,
}
