//! A bundle is a directory holding one validated graph with its companions:
//!
//! * `graph.csr`: binary CSR graph
//! * `labels.txt`, `split.txt`: one line per node
//! * `probs.txt`: optional `u v p` linking probabilities
//! * `edges.txt`: optional canonical edge list
//! * `bundle.json`: counts and label mode
//! * `manifest.json`: how the bundle was produced

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use anyhow::{bail, Context, Result};
use dropreef_core::io::{
    read_csr, read_labels, read_split, write_csr, write_edge_list, write_labels, write_split,
};
use dropreef_core::probs::read_probs;
use dropreef_core::{CsrGraph, EdgeProbabilities, LabelMatrix, LabelMode, SplitMask};
use serde::{Deserialize, Serialize};

use crate::output::OutputDir;

pub const GRAPH: &str = "graph.csr";
pub const LABELS: &str = "labels.txt";
pub const SPLIT: &str = "split.txt";
pub const PROBS: &str = "probs.txt";
pub const EDGES: &str = "edges.txt";
pub const META: &str = "bundle.json";

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct BundleMeta {
    pub num_nodes: usize,
    pub num_edges: usize,
    pub num_classes: usize,
    pub label_mode: LabelMode,
    pub has_probs: bool,
}

pub struct Bundle {
    pub graph: CsrGraph,
    pub labels: LabelMatrix,
    pub split: SplitMask,
    pub probs: Option<EdgeProbabilities>,
}

fn open(path: &Path) -> Result<BufReader<File>> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(BufReader::new(f))
}

impl Bundle {
    pub fn load(dir: &Path) -> Result<Self> {
        let meta_path = dir.join(META);
        let meta: BundleMeta = serde_json::from_reader(open(&meta_path)?)
            .with_context(|| format!("reading {}", meta_path.display()))?;
        let graph_path = dir.join(GRAPH);
        let graph = read_csr(open(&graph_path)?)
            .with_context(|| format!("reading {}", graph_path.display()))?;
        if graph.num_nodes() != meta.num_nodes || graph.num_edges() != meta.num_edges {
            bail!(
                "{}: graph has {} nodes and {} edges but {} records {} and {}",
                graph_path.display(),
                graph.num_nodes(),
                graph.num_edges(),
                META,
                meta.num_nodes,
                meta.num_edges
            );
        }
        let labels_path = dir.join(LABELS);
        let labels = read_labels(
            open(&labels_path)?,
            &labels_path.display().to_string(),
            Some(meta.num_classes),
            meta.label_mode,
        )?;
        check_count(
            &labels_path,
            "label lines",
            meta.num_nodes,
            labels.num_nodes(),
        )?;
        let split_path = dir.join(SPLIT);
        let split = read_split(open(&split_path)?, &split_path.display().to_string())?;
        check_count(&split_path, "split lines", meta.num_nodes, split.len())?;
        let probs = if meta.has_probs {
            let p = dir.join(PROBS);
            Some(read_probs(open(&p)?, &p.display().to_string(), &graph)?)
        } else {
            None
        };
        Ok(Self {
            graph,
            labels,
            split,
            probs,
        })
    }
}

pub fn check_count(path: &Path, what: &str, expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        bail!(
            "{}: expected {expected} {what} (one per node), found {actual}",
            path.display()
        );
    }
    Ok(())
}

/// Write every bundle file into `out`.
pub fn write_bundle(
    out: &mut OutputDir,
    graph: &CsrGraph,
    labels: &LabelMatrix,
    split: &SplitMask,
    probs: Option<&EdgeProbabilities>,
    emit_edges: bool,
) -> Result<()> {
    out.write(GRAPH, |w| Ok(write_csr(graph, w)?))?;
    out.write(LABELS, |w| Ok(write_labels(labels, w)?))?;
    out.write(SPLIT, |w| Ok(write_split(split, w)?))?;
    if let Some(p) = probs {
        out.write(PROBS, |w| Ok(p.write_records(graph, w)?))?;
    }
    if emit_edges {
        out.write(EDGES, |w| Ok(write_edge_list(graph, w)?))?;
    }
    let meta = BundleMeta {
        num_nodes: graph.num_nodes(),
        num_edges: graph.num_edges(),
        num_classes: labels.num_classes(),
        label_mode: labels.mode(),
        has_probs: probs.is_some(),
    };
    out.write_json(META, &meta)
}
