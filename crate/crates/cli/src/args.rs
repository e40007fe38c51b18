use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hew_core::datasets::Dataset;
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "hew",
    version,
    about = "Harris extended Weibull fitting and simulation"
)]
pub struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit HEW by one estimation method.
    Fit(FitArgs),
    /// Fit HEW and the three Weibull variants by maximum likelihood.
    Compare(CompareArgs),
    /// Bayesian HEW fit by random-walk Metropolis–Hastings.
    Bayes(BayesArgs),
    /// Monte-Carlo study of estimator RMSE and bias.
    Simulate(SimulateArgs),
    /// Draw a HEW sample, one value per line.
    Sample(SampleArgs),
    /// Evaluate pdf, cdf and survival function on an even grid.
    Grid(GridArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
#[group(required = true, multiple = false)]
pub struct DataArgs {
    /// Single-column CSV of positive observations (optional header row).
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Reference dataset. Carbon and carcinoma are read from $HEW_DATA_DIR.
    #[arg(long, value_enum)]
    pub dataset: Option<DatasetArg>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetArg {
    Bladder,
    Carcinoma,
    Carbon,
}

impl From<DatasetArg> for Dataset {
    fn from(d: DatasetArg) -> Self {
        match d {
            DatasetArg::Bladder => Dataset::Bladder,
            DatasetArg::Carcinoma => Dataset::Carcinoma,
            DatasetArg::Carbon => Dataset::Carbon,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Mle,
    Ols,
    Wls,
    Mps,
    Ad,
    Cvm,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OptimizerArg {
    NelderMead,
    Genetic,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PValueArg {
    Bootstrap,
    Asymptotic,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GofArgs {
    /// How goodness-of-fit p-values are computed. Asymptotic values ignore
    /// parameter estimation and are anti-conservative.
    #[arg(long, value_enum, default_value_t = PValueArg::Bootstrap)]
    pub pvalues: PValueArg,
    /// Parametric-bootstrap replicates (at least 99).
    #[arg(long, default_value_t = hew_core::gof::DEFAULT_REPLICATES)]
    pub replicates: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum, default_value_t = MethodArg::Mle)]
    pub method: MethodArg,
    #[arg(long, value_enum, default_value_t = OptimizerArg::NelderMead)]
    pub optimizer: OptimizerArg,
    /// Optimiser starts; the best end point wins.
    #[arg(long, default_value_t = 5)]
    pub restarts: usize,
    #[command(flatten)]
    pub gof: GofArgs,
    /// Seed for optimiser randomness and the bootstrap.
    #[arg(long, env = "HEW_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Write the JSON document here and print a summary table instead.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CompareArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub gof: GofArgs,
    #[arg(long, env = "HEW_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BayesArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value_t = 50_000)]
    pub iterations: usize,
    #[arg(long, default_value_t = 10_000)]
    pub burn_in: usize,
    #[arg(long, default_value_t = 5)]
    pub thin: usize,
    /// Standard deviations of the proposal increments (θ, k, β, α).
    #[arg(long, num_args = 4, value_names = ["THETA", "K", "BETA", "ALPHA"])]
    pub proposal_scale: Option<Vec<f64>>,
    /// `auto` elicits Gamma priors from the MLE and its standard errors;
    /// otherwise a JSON file with one entry per parameter, each either
    /// {"shape", "rate"} or {"mean", "sd"}.
    #[arg(long, default_value = "auto")]
    pub priors: String,
    /// Credible level of the HPD and equal-tailed intervals.
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    #[arg(long, env = "HEW_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// Trace CSV; defaults to `<out>.chain.csv` when --out is given.
    #[arg(long)]
    #[serde(skip)]
    pub chain: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long, num_args = 4, value_names = ["THETA", "K", "BETA", "ALPHA"], default_values_t = [0.1, 0.13, 10.0, 1.0])]
    pub truth: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [25, 50, 100, 200])]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 200)]
    pub reps: usize,
    /// Comma-separated subset of mle, ols, wls, mps, ad, cvm, bayes.
    #[arg(long, value_delimiter = ',', default_value = "mle")]
    pub methods: Vec<String>,
    #[arg(long, value_enum, default_value_t = OptimizerArg::NelderMead)]
    pub optimizer: OptimizerArg,
    #[arg(long, default_value_t = 5)]
    pub restarts: usize,
    /// Metropolis–Hastings iterations per Bayes replication.
    #[arg(long, default_value_t = 12_000)]
    pub chain_iterations: usize,
    #[arg(long, default_value_t = 2_000)]
    pub chain_burn_in: usize,
    #[arg(long, env = "HEW_SEED", default_value_t = 0)]
    pub seed: u64,
    /// JSON report path; the long-format CSV goes next to it with a `.csv`
    /// extension.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SampleArgs {
    #[arg(long, num_args = 4, value_names = ["THETA", "K", "BETA", "ALPHA"], required = true)]
    pub params: Vec<f64>,
    #[arg(long)]
    pub n: usize,
    #[arg(long, env = "HEW_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GridArgs {
    #[arg(long, num_args = 4, value_names = ["THETA", "K", "BETA", "ALPHA"], required = true)]
    pub params: Vec<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub xmin: f64,
    #[arg(long)]
    pub xmax: f64,
    #[arg(long, default_value_t = 201)]
    pub points: usize,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}
