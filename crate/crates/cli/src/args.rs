use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "ltv",
    version,
    about = "Profit maximization under the LT-V diffusion model"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Assign influence weights to an edge list and write a weights file.
    Weights(WeightsArgs),
    /// Select seeds and prices with All-OMP, FFS, PAGE or the restricted objective.
    Optimize(OptimizeArgs),
    /// Fit a normal valuation model to review data.
    Fit(FitArgs),
    /// Run one diffusion, optionally tracing each step.
    Simulate(SimulateArgs),
    /// Evaluate a campaign exactly by possible-world enumeration.
    Exact(ExactArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Wd,
    WdFallback,
    Tv,
    Preweighted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Uniform,
    Normal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgorithmArg {
    AllOmp,
    Ffs,
    Page,
    Restricted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleArg {
    Mc,
    Exact,
}

#[derive(Debug, Clone, Args)]
pub struct GraphArgs {
    /// Edge list, or a weights file with `--scheme preweighted`.
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, value_enum, default_value = "preweighted")]
    pub scheme: SchemeArg,
    /// Per-node action totals (`node_id total` per line) for the wd scheme.
    #[arg(long)]
    pub actions: Option<PathBuf>,
    /// Seed for trivalency weights.
    #[arg(long, default_value_t = 0)]
    pub weight_seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Valuation distribution shared by every node.
    #[arg(long, value_enum, default_value = "uniform")]
    pub model: ModelArg,
    #[arg(long, default_value_t = 0.53)]
    pub mu: f64,
    #[arg(long, default_value_t = 0.14)]
    pub sigma: f64,
}

#[derive(Debug, Clone, Args)]
pub struct WeightsArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub scheme: SchemeArg,
    #[arg(long)]
    pub actions: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Acquisition cost per seed.
    #[arg(long, default_value_t = 0.001)]
    pub cost: f64,
    #[arg(long, value_enum, default_value = "page")]
    pub algorithm: AlgorithmArg,
    /// Common valuation and price for `--algorithm restricted`.
    #[arg(long)]
    pub restricted_price: Option<f64>,
    #[arg(long, value_enum, default_value = "mc")]
    pub oracle: OracleArg,
    #[arg(long, default_value_t = 10_000)]
    pub simulations: usize,
    /// Runs per conditional estimate in PAGE; defaults to `--simulations`.
    #[arg(long)]
    pub conditional_simulations: Option<usize>,
    /// Runs for the final re-evaluation; defaults to `--simulations`.
    #[arg(long)]
    pub summary_simulations: Option<usize>,
    #[arg(long, default_value_t = 100, conflicts_with = "no_seed_limit")]
    pub max_seeds: usize,
    /// Keep adding seeds while some marginal profit exceeds epsilon.
    #[arg(long)]
    pub no_seed_limit: bool,
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for Monte-Carlo runs; results do not depend on it.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Results CSV; per-iteration timings go next to it as `*.timings.csv`.
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    /// CSV with header `price,rating`, or `value` with `--raw-values`.
    #[arg(long)]
    pub reviews: PathBuf,
    /// Read valuations in [0,1] directly instead of transforming reviews.
    #[arg(long)]
    pub raw_values: bool,
}

#[derive(Debug, Clone, Args)]
pub struct CampaignArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Seed node ids, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub seeds: Vec<u64>,
    /// Price quoted to every node; defaults to the optimal myopic price.
    #[arg(long)]
    pub price: Option<f64>,
    #[arg(long, default_value_t = 0.001)]
    pub cost: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub campaign: CampaignArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Print newly influenced and adopting nodes per step.
    #[arg(long)]
    pub trace: bool,
    /// Also estimate the expected profit from this many runs.
    #[arg(long)]
    pub simulations: Option<usize>,
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct ExactArgs {
    #[command(flatten)]
    pub campaign: CampaignArgs,
    /// Also report the conditional profits and PAGE price of this node.
    #[arg(long)]
    pub candidate: Option<u64>,
}
