use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::path::PathBuf;

use propest::kernels::Edges;
use propest::simharness::{EstimatorId, Scenario, Sparsity};
use propest::{FamilyKind, OmegaDensity, Rule};

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "propest",
    version,
    about = "Estimate proportions of false nulls for composite null hypotheses"
)]
pub struct Cli {
    /// Worker threads for kernel evaluation and replications.
    #[arg(long, env = "PROPEST_THREADS", global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum Command {
    /// Estimate the alternative proportion of a vector of observations.
    Estimate(EstimateArgs),
    /// MR and fixed-lambda Storey estimates from one-sided p-values.
    Baselines(BaselineArgs),
    /// Run a simulation scenario and write per-replication excess to CSV.
    Simulate(SimulateArgs),
    /// Tabulate psi and K over a grid.
    KernelTable(KernelTableArgs),
    /// Recompute mean and sd of the excess from a simulation CSV.
    Summary(SummaryArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NullKind {
    Point,
    Bounded,
    BoundedClosed,
    OneSided,
    OneSidedClosed,
    ExtTrunc2norm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyArg {
    Gaussian,
    Laplace,
    Logistic,
    Hsecant,
    Cauchy,
}

impl From<FamilyArg> for FamilyKind {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Gaussian => FamilyKind::Gaussian,
            FamilyArg::Laplace => FamilyKind::Laplace,
            FamilyArg::Logistic => FamilyKind::Logistic,
            FamilyArg::Hsecant => FamilyKind::HyperbolicSecant,
            FamilyArg::Cauchy => FamilyKind::Cauchy,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OmegaArg {
    Triangular,
    Uniform,
}

impl From<OmegaArg> for OmegaDensity {
    fn from(o: OmegaArg) -> Self {
        match o {
            OmegaArg::Triangular => OmegaDensity::Triangular,
            OmegaArg::Uniform => OmegaDensity::Uniform,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleArg {
    Midpoint,
    Left,
}

impl From<RuleArg> for Rule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::Midpoint => Rule::Midpoint,
            RuleArg::Left => Rule::LeftEndpoint,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgesArg {
    None,
    Open,
    Closed,
}

impl From<EdgesArg> for Edges {
    fn from(e: EdgesArg) -> Self {
        match e {
            EdgesArg::None => Edges::Unadjusted,
            EdgesArg::Open => Edges::Open,
            EdgesArg::Closed => Edges::Closed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum ScenarioArg {
    #[value(name = "1")]
    Bounded,
    #[value(name = "2")]
    OneSided,
    #[value(name = "3")]
    Trunc2norm,
}

impl From<ScenarioArg> for Scenario {
    fn from(s: ScenarioArg) -> Self {
        match s {
            ScenarioArg::Bounded => Scenario::Bounded,
            ScenarioArg::OneSided => Scenario::OneSided,
            ScenarioArg::Trunc2norm => Scenario::TruncatedSquare,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SparsityArg {
    Dense,
    Moderate,
}

impl From<SparsityArg> for Sparsity {
    fn from(s: SparsityArg) -> Self {
        match s {
            SparsityArg::Dense => Sparsity::Dense,
            SparsityArg::Moderate => Sparsity::Moderate,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorArg {
    New,
    Mr,
    Storey,
}

impl From<EstimatorArg> for EstimatorId {
    fn from(e: EstimatorArg) -> Self {
        match e {
            EstimatorArg::New => EstimatorId::New,
            EstimatorArg::Mr => EstimatorId::Mr,
            EstimatorArg::Storey => EstimatorId::Storey,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct QuadArgs {
    /// Partition mesh of every Riemann sum.
    #[arg(long, default_value_t = 0.01)]
    pub quad_norm: f64,
    /// Node placement inside each cell.
    #[arg(long, value_enum, default_value_t = RuleArg::Midpoint)]
    pub quad_rule: RuleArg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct NullArgs {
    #[arg(long, value_enum)]
    pub null: NullKind,
    /// Lower end of a bounded or extension null.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    /// Upper end of a bounded or extension null, or the one-sided boundary.
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    /// Point null value.
    #[arg(long, allow_hyphen_values = true)]
    pub mu0: Option<f64>,
    /// Endpoint treatment of the ext-trunc2norm null.
    #[arg(long, value_enum, default_value_t = EdgesArg::None)]
    pub ext_edges: EdgesArg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FamilyArgs {
    #[arg(long, value_enum, default_value_t = FamilyArg::Gaussian)]
    pub family: FamilyArg,
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct EstimateArgs {
    /// Observations: one per line, or a single-column CSV with optional header. `-` reads stdin.
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub family: FamilyArgs,
    #[command(flatten)]
    pub null: NullArgs,
    /// Speed tuning parameter in t = sqrt(2 gamma ln m).
    #[arg(long, default_value_t = 0.495)]
    pub gamma: f64,
    /// Fixed speed, overriding --gamma.
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long, value_enum, default_value_t = OmegaArg::Triangular)]
    pub omega: OmegaArg,
    #[command(flatten)]
    pub quad: QuadArgs,
    /// Write the JSON result here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct BaselineArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Boundary of the one-sided null the p-values test against.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub b: f64,
    /// Threshold of the Storey estimator.
    #[arg(long, default_value_t = 0.5)]
    pub lambda: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub scenario: ScenarioArg,
    #[arg(long)]
    pub m: usize,
    #[arg(long, value_enum, default_value_t = SparsityArg::Dense)]
    pub sparsity: SparsityArg,
    #[arg(long, default_value_t = 200)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.495)]
    pub gamma: f64,
    #[arg(long, value_enum, default_value_t = OmegaArg::Triangular)]
    pub omega: OmegaArg,
    /// Comma-separated estimators; mr and storey apply to scenario 2 only.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "new")]
    pub estimators: Vec<EstimatorArg>,
    #[arg(long, default_value_t = 0.5)]
    pub lambda: f64,
    #[command(flatten)]
    pub quad: QuadArgs,
    /// Per-replication CSV; the summary JSON is written beside it.
    #[arg(long)]
    pub out: PathBuf,
    /// Summary JSON path (default: the CSV path with a `.summary.json` extension).
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct KernelTableArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[command(flatten)]
    pub null: NullArgs,
    /// Speed used for psi.
    #[arg(long)]
    pub t: f64,
    /// Speed used for K (defaults to --t).
    #[arg(long)]
    pub t_k: Option<f64>,
    /// Grid as lo:hi:step.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: String,
    #[arg(long, value_enum, default_value_t = OmegaArg::Triangular)]
    pub omega: OmegaArg,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SummaryArgs {
    /// CSV written by `simulate`.
    #[arg(long)]
    pub input: PathBuf,
}
