use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "divscore", version, about = "Benchmark graphs, node embeddings and their divergence scores")]
pub struct Cli {
    /// Base seed; every random choice is derived from it [default: 0, or
    /// the seed in an `abcd --manifest`].
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Directory for output files.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,

    /// Worker threads.
    #[arg(long, global = true, default_value_t = 1)]
    pub workers: usize,

    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate an ABCD graph with ground-truth communities.
    Abcd(AbcdArgs),
    /// Embed the nodes of a graph.
    Embed(EmbedArgs),
    /// Cluster a graph.
    Cluster(ClusterArgs),
    /// Divergence score of an embedding.
    Score(ScoreArgs),
    /// Supervised evaluation task, appended to a results CSV.
    Eval(EvalArgs),
    /// Resumable parameter sweep over generated graphs.
    Sweep(SweepArgs),
    /// Descriptive statistics of a graph.
    Stats(StatsArgs),
}

#[derive(Args, Debug)]
pub struct AbcdArgs {
    /// Start from a key=value parameter manifest; flags override it.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Degree power-law exponent.
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub delta_min: Option<usize>,
    /// Maximum degree (default: natural cut-off for n and gamma).
    #[arg(long)]
    pub delta_max: Option<usize>,
    /// Community-size power-law exponent.
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub s_min: Option<usize>,
    #[arg(long)]
    pub s_max: Option<usize>,
    /// Mixing parameter in [0, 1].
    #[arg(long)]
    pub xi: Option<f64>,
    /// global | local
    #[arg(long)]
    pub variant: Option<String>,
    /// configuration | chung_lu
    #[arg(long)]
    pub community_model: Option<String>,
    /// Comma-separated community fractions, or `none` to sample sizes.
    #[arg(long)]
    pub fractions: Option<String>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Node2vec,
    Deepwalk,
    Hope,
    Random,
}

#[derive(Args, Debug, Clone)]
pub struct AlgoArgs {
    #[arg(long, value_enum, default_value_t = Algo::Node2vec)]
    pub algo: Algo,
    #[arg(long, default_value_t = 128)]
    pub dim: usize,
    /// Return parameter.
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
    /// In-out parameter.
    #[arg(long, default_value_t = 1.0)]
    pub q: f64,
    #[arg(long, default_value_t = 10)]
    pub num_walks: usize,
    #[arg(long, default_value_t = 80)]
    pub walk_length: usize,
    #[arg(long, default_value_t = 10)]
    pub window: usize,
    #[arg(long, default_value_t = 5)]
    pub negatives: usize,
    #[arg(long, default_value_t = 5)]
    pub epochs: usize,
    #[arg(long, default_value_t = 0.025)]
    pub learning_rate: f64,
}

#[derive(Args, Debug)]
pub struct EmbedArgs {
    /// Edge list.
    #[arg(long)]
    pub graph: PathBuf,
    #[command(flatten)]
    pub algo: AlgoArgs,
    /// Output file (default: <out-dir>/embedding.txt).
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Compute and write in double precision.
    #[arg(long)]
    pub f64: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ClustererKind {
    Ecg,
    Louvain,
    /// Read the partition from --partition.
    File,
}

#[derive(Args, Debug, Clone)]
pub struct ClustererArgs {
    #[arg(long, value_enum, default_value_t = ClustererKind::Ecg)]
    pub clusterer: ClustererKind,
    /// Partition file for `--clusterer file`.
    #[arg(long)]
    pub partition: Option<PathBuf>,
    /// ECG ensemble size.
    #[arg(long, default_value_t = 16)]
    pub ensemble: usize,
}

#[derive(Args, Debug)]
pub struct ClusterArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[command(flatten)]
    pub clusterer: ClustererArgs,
    /// Output file (default: <out-dir>/partition.txt).
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct ScoreOptionArgs {
    /// Weight of the inter-community term.
    #[arg(long, default_value_t = 0.5)]
    pub w_inter: f64,
    /// Weight of the intra-community term.
    #[arg(long, default_value_t = 0.5)]
    pub w_intra: f64,
    /// Largest alpha on the search grid.
    #[arg(long, default_value_t = 10.0)]
    pub alpha_max: f64,
    #[arg(long, default_value_t = 0.25)]
    pub alpha_step: f64,
    /// How far the search may continue past alpha-max while the
    /// divergence keeps falling (set equal to alpha-max to disable).
    #[arg(long, default_value_t = 100.0)]
    pub alpha_cap: f64,
    /// Iteration cap of each Chung-Lu fit.
    #[arg(long, default_value_t = 1000)]
    pub max_iter: usize,
}

#[derive(Args, Debug)]
pub struct ScoreArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub embedding: PathBuf,
    #[command(flatten)]
    pub clusterer: ClustererArgs,
    #[command(flatten)]
    pub options: ScoreOptionArgs,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Task {
    /// k-NN node classification against the labels.
    Classify,
    /// k-means clustering compared with the labels by AMI.
    Communities,
    /// Held-out edge recovery, scored by AUC.
    Linkpred,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[arg(long, value_enum)]
    pub task: Task,
    #[arg(long)]
    pub graph: PathBuf,
    /// Ground-truth partition (classify, communities).
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Evaluate this embedding file instead of computing one (not for linkpred).
    #[arg(long)]
    pub embedding: Option<PathBuf>,
    #[command(flatten)]
    pub algo: AlgoArgs,
    /// Fraction of edges held out for link prediction.
    #[arg(long, default_value_t = 0.1)]
    pub holdout: f64,
    /// Neighbours in the k-NN vote.
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    /// Results CSV to append to (default: <out-dir>/eval.csv).
    #[arg(long)]
    pub results: Option<PathBuf>,
    /// Graph identifier in the CSV (default: graph file stem).
    #[arg(long)]
    pub graph_id: Option<String>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Parameter to vary: xi | n | gamma | beta.
    #[arg(long, default_value = "xi")]
    pub param: String,
    /// Comma-separated values (default: 0.1,0.2,...,1.0).
    #[arg(long)]
    pub values: Option<String>,
    #[arg(long, default_value_t = 3)]
    pub graphs: usize,
    #[arg(long, default_value_t = 3)]
    pub embeddings: usize,
    /// Comma-separated algorithms: deepwalk, node2vec:P:Q, hope, random.
    #[arg(long, default_value = "deepwalk")]
    pub algos: String,
    /// Comma-separated dimensions.
    #[arg(long, default_value = "32")]
    pub dims: String,
    /// Base graph size.
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// Base mixing parameter (when not swept).
    #[arg(long, default_value_t = 0.2)]
    pub xi: f64,
}

#[derive(Args, Debug)]
pub struct StatsArgs {
    #[arg(long)]
    pub graph: PathBuf,
}
