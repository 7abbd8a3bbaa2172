//! Offline detection and removal of redundant nodes in large graphs.
//!
//! Training nodes that combine a high degree with a heterophilic
//! neighborhood (high weighted neighbor heterophily, WNH) are dropped once,
//! before any sampling-based GNN training, together with their edges. The
//! crate also ships the distribution reports and subgraph statistics used to
//! inspect a graph before and after the drop.
//!
//! Modules map onto the pipeline:
//!
//! * [`graph`]: undirected CSR graphs, node removal and induced subgraphs
//! * [`labels`]: class vectors and train/val/test roles
//! * [`probs`]: per-edge linking probabilities
//! * [`metrics`]: neighbor heterophily, WNH, degree and overlap reports
//! * [`dropreef`]: redundancy detection and the drop itself
//! * [`sampling`]: random node sampling, shared-neighbor matrices, triangles
//! * [`io`]: file formats

pub mod dropreef;
pub mod error;
pub mod graph;
pub mod io;
pub mod labels;
pub mod metrics;
pub mod probs;
pub mod sampling;
pub mod synth;

pub use dropreef::{
    detect_redundant, drop_nodes, drop_with_metrics, run_dropreef, threshold_from_quantile,
    DropConfig, DropOutcome, DropReport, DropRun,
};
pub use error::{Error, Result};
pub use graph::{CsrGraph, NodeId, NodeIdMap};
pub use labels::{LabelMatrix, LabelMode, Role, SplitMask};
pub use metrics::{
    degree_quantiles, hete, hete_all, label_distance, overlap_report, wnh, wnh_all, NodeMetrics,
    OverlapReport, QuantileReport,
};
pub use probs::{heuristic_probs, load_probs, uniform_probs, EdgeProbabilities, Heuristic};
pub use sampling::{
    batch_stats, closed_triads, clustering_coefficient, region_density, sample_nodes,
    sample_subgraph, shared_neighbors, BatchStats, SharedNeighborMatrix, SubgraphStats,
};
