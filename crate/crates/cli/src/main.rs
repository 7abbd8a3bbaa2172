//! `dropreef`: offline redundancy dropping for large training graphs.

mod bundle;
mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 0;

#[derive(Parser, Debug)]
#[command(
    name = "dropreef",
    version,
    about = "Detect and drop redundant training nodes from a graph"
)]
pub struct Cli {
    /// Worker threads. Defaults to one per core; outputs never depend on it.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    pub threads: Option<u32>,

    /// Format of report files.
    #[arg(long, global = true, value_enum, default_value_t = Format::Tsv)]
    pub format: Format,

    /// Seed for all sampling (ChaCha8; sample i uses stream i).
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Tsv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GraphFormat {
    /// Text edge list, `u v` per line.
    Edges,
    /// Binary `GRF1` CSR.
    Csr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HeuristicArg {
    Jaccard,
    CommonNeighbors,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NodeScope {
    /// Training nodes only.
    Train,
    All,
}

#[derive(Args, Debug, Clone)]
pub struct ProbArgs {
    /// Linking probabilities as `u v p` records; unlisted edges get 1.0.
    #[arg(long, value_name = "FILE", conflicts_with_all = ["heuristic", "uniform"])]
    pub probs: Option<PathBuf>,

    /// Derive linking probabilities from the graph structure.
    #[arg(long, value_enum, conflicts_with = "uniform")]
    pub heuristic: Option<HeuristicArg>,

    /// Weight every edge 1.0 even if the bundle stores probabilities.
    #[arg(long)]
    pub uniform: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Validate text inputs and write a binary bundle.
    Ingest(IngestArgs),
    /// Compute the WNH snapshot of a bundle.
    Wnh(WnhArgs),
    /// Compute or canonicalize linking probabilities.
    Probs(ProbsCmdArgs),
    /// Drop redundant training nodes and write the low-redundancy bundle.
    Drop(DropArgs),
    /// Sample one node-induced subgraph.
    Sample(SampleArgs),
    /// Diagnostic reports.
    Analyze {
        #[command(subcommand)]
        which: Analysis,
    },
}

#[derive(Args, Debug)]
pub struct IngestArgs {
    #[arg(long, value_name = "FILE")]
    pub edges: PathBuf,
    #[arg(long, value_enum, default_value_t = GraphFormat::Edges)]
    pub graph_format: GraphFormat,
    /// One line of class indices per node.
    #[arg(long, value_name = "FILE")]
    pub labels: PathBuf,
    /// One of train/val/test per node. Without it every node is a training node.
    #[arg(long, value_name = "FILE")]
    pub split: Option<PathBuf>,
    /// Optional `u v p` probability file stored with the bundle.
    #[arg(long, value_name = "FILE")]
    pub probs: Option<PathBuf>,
    /// Node count. Defaults to the number of label lines.
    #[arg(long)]
    pub num_nodes: Option<usize>,
    /// Class count. Defaults to the largest class index plus one.
    #[arg(long)]
    pub num_classes: Option<usize>,
    /// Labels may carry any number of classes per node.
    #[arg(long)]
    pub multi_label: bool,
    /// Also write the canonical edge list.
    #[arg(long)]
    pub emit_edges: bool,
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct WnhArgs {
    pub bundle: PathBuf,
    #[command(flatten)]
    pub probs: ProbArgs,
    #[arg(long, value_enum, default_value_t = NodeScope::Train)]
    pub nodes: NodeScope,
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["probs", "heuristic"]))]
pub struct ProbsCmdArgs {
    pub bundle: PathBuf,
    #[command(flatten)]
    pub probs: ProbArgs,
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("wnh_threshold").required(true).args(["th_wnh", "wnh_quantile"]))]
#[command(group = clap::ArgGroup::new("deg_threshold").required(true).args(["th_deg", "deg_quantile"]))]
pub struct DropArgs {
    pub bundle: PathBuf,
    /// WNH threshold; nodes at or above it qualify.
    #[arg(long)]
    pub th_wnh: Option<f64>,
    /// Degree threshold; nodes at or above it qualify.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub th_deg: Option<u64>,
    /// Take the WNH threshold as this nearest-rank quantile of training WNH.
    #[arg(long)]
    pub wnh_quantile: Option<f64>,
    /// Take the degree threshold as this nearest-rank quantile of training degrees.
    #[arg(long)]
    pub deg_quantile: Option<f64>,
    /// Keep dropped nodes and their validation/test edges for inference.
    #[arg(long)]
    pub retain_inference_edges: bool,
    #[command(flatten)]
    pub probs: ProbArgs,
    /// Reuse a saved WNH snapshot instead of recomputing it.
    #[arg(long, value_name = "FILE", conflicts_with_all = ["probs", "heuristic", "uniform"])]
    pub wnh_snapshot: Option<PathBuf>,
    /// Node map translating the snapshot's ids into this bundle's ids.
    #[arg(long, value_name = "FILE", requires = "wnh_snapshot")]
    pub node_map: Option<PathBuf>,
    #[arg(long)]
    pub emit_edges: bool,
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    pub bundle: PathBuf,
    #[arg(long)]
    pub budget: usize,
    /// Which sample of the seeded sequence to take.
    #[arg(long, default_value_t = 0)]
    pub index: usize,
    #[arg(long)]
    pub emit_edges: bool,
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Subcommand, Debug)]
pub enum Analysis {
    /// Degree mass held by the top-degree nodes, per bucket.
    Quantiles {
        bundle: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        top_fraction: f64,
        #[arg(long, default_value_t = 5)]
        buckets: usize,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
    },
    /// Where the top-WNH nodes sit among the top-degree buckets.
    Overlap {
        bundle: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        wnh_top: f64,
        #[arg(long, default_value_t = 0.5)]
        deg_top: f64,
        #[arg(long, default_value_t = 5)]
        buckets: usize,
        #[arg(long, value_enum, default_value_t = NodeScope::Train)]
        nodes: NodeScope,
        #[command(flatten)]
        probs: ProbArgs,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
    },
    /// Mean clustering coefficient and closed triads over sampled subgraphs.
    SubgraphStats {
        bundle: PathBuf,
        #[arg(long)]
        budget: usize,
        #[arg(long, default_value_t = 1000)]
        num_samples: usize,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
    },
    /// Shared-neighbor matrix of a sampled subgraph and its densest regions.
    SharedNeighbors {
        bundle: PathBuf,
        /// Sample size; the whole graph when omitted.
        #[arg(long)]
        budget: Option<usize>,
        /// Largest subgraph for which the dense matrix is built.
        #[arg(long, default_value_t = dropreef_core::sampling::DEFAULT_DENSE_CAP)]
        cap: usize,
        #[arg(long, default_value_t = 3)]
        window: usize,
        /// Number of regions reported.
        #[arg(long, default_value_t = 10)]
        top: usize,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
