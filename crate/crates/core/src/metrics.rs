//! Neighbor heterophily metrics and the degree/WNH distribution reports.
//!
//! `Hete_v` is the mean Euclidean distance between `v`'s class vector and
//! those of its one-hop neighbors; WNH weights each neighbor term by the
//! edge's linking probability. Both are defined as 0 for isolated nodes.
//! Per-node sums always run over the sorted neighbor list, so results are
//! bit-identical regardless of thread count.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{CsrGraph, NodeId};
use crate::labels::LabelMatrix;
use crate::probs::EdgeProbabilities;

/// Euclidean norm of `cv - cu`.
pub fn label_distance(cv: &[f64], cu: &[f64]) -> Result<f64> {
    if cv.len() != cu.len() {
        return Err(Error::CountMismatch {
            what: "label vector length".into(),
            expected: cv.len(),
            actual: cu.len(),
        });
    }
    Ok(cv
        .iter()
        .zip(cu)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt())
}

fn check_labels(graph: &CsrGraph, labels: &LabelMatrix) -> Result<()> {
    if labels.num_nodes() != graph.num_nodes() {
        return Err(Error::CountMismatch {
            what: "label rows".into(),
            expected: graph.num_nodes(),
            actual: labels.num_nodes(),
        });
    }
    Ok(())
}

fn check_probs(graph: &CsrGraph, probs: &EdgeProbabilities) -> Result<()> {
    if probs.len() != graph.targets().len() {
        return Err(Error::CountMismatch {
            what: "edge probability slots".into(),
            expected: graph.targets().len(),
            actual: probs.len(),
        });
    }
    Ok(())
}

#[inline]
fn hete_unchecked(graph: &CsrGraph, labels: &LabelMatrix, v: usize) -> f64 {
    let nbrs = graph.adj(v);
    if nbrs.is_empty() {
        return 0.0;
    }
    let mut sum = 0.0;
    for &u in nbrs {
        sum += labels.distance(v, u as usize);
    }
    sum / nbrs.len() as f64
}

#[inline]
fn wnh_unchecked(graph: &CsrGraph, labels: &LabelMatrix, probs: &[f64], v: usize) -> f64 {
    let range = graph.slot_range(v);
    if range.is_empty() {
        return 0.0;
    }
    let degree = range.len();
    let mut sum = 0.0;
    for slot in range {
        let u = graph.targets()[slot] as usize;
        sum += probs[slot] * labels.distance(v, u);
    }
    sum / degree as f64
}

/// Unweighted neighbor heterophily of `v`.
pub fn hete(graph: &CsrGraph, labels: &LabelMatrix, v: NodeId) -> Result<f64> {
    graph.degree(v)?;
    check_labels(graph, labels)?;
    Ok(hete_unchecked(graph, labels, v as usize))
}

/// Weighted neighbor heterophily of `v`.
pub fn wnh(
    graph: &CsrGraph,
    labels: &LabelMatrix,
    probs: &EdgeProbabilities,
    v: NodeId,
) -> Result<f64> {
    graph.degree(v)?;
    check_labels(graph, labels)?;
    check_probs(graph, probs)?;
    Ok(wnh_unchecked(graph, labels, probs.values(), v as usize))
}

/// Degree and WNH for a node subset, stored in ascending node order.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeMetrics {
    nodes: Vec<NodeId>,
    degree: Vec<usize>,
    wnh: Vec<f64>,
}

impl NodeMetrics {
    /// Assemble metrics from parallel columns, e.g. a loaded snapshot. Nodes
    /// must be strictly ascending.
    pub fn from_parts(nodes: Vec<NodeId>, degree: Vec<usize>, wnh: Vec<f64>) -> Result<Self> {
        if degree.len() != nodes.len() || wnh.len() != nodes.len() {
            return Err(Error::InvalidInput(format!(
                "metric columns differ in length ({}, {}, {})",
                nodes.len(),
                degree.len(),
                wnh.len()
            )));
        }
        if nodes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput(
                "metric nodes must be strictly ascending".into(),
            ));
        }
        Ok(Self { nodes, degree, wnh })
    }

    /// Entries of retained nodes, renumbered through `map`. Stored degrees
    /// and WNH values are carried over unchanged.
    pub fn remap(&self, map: &crate::graph::NodeIdMap) -> NodeMetrics {
        let mut out = NodeMetrics {
            nodes: Vec::new(),
            degree: Vec::new(),
            wnh: Vec::new(),
        };
        for (v, d, w) in self.iter() {
            if let Some(new) = map.new_id(v) {
                out.nodes.push(new);
                out.degree.push(d);
                out.wnh.push(w);
            }
        }
        out
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degree
    }

    pub fn wnh_values(&self) -> &[f64] {
        &self.wnh
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn position(&self, v: NodeId) -> Option<usize> {
        self.nodes.binary_search(&v).ok()
    }

    pub fn wnh_of(&self, v: NodeId) -> Option<f64> {
        self.position(v).map(|i| self.wnh[i])
    }

    pub fn degree_of(&self, v: NodeId) -> Option<usize> {
        self.position(v).map(|i| self.degree[i])
    }

    /// `(node, degree, wnh)` rows in ascending node order.
    pub fn iter(&self) -> impl Iterator<Item = (NodeId, usize, f64)> + '_ {
        self.nodes
            .iter()
            .zip(&self.degree)
            .zip(&self.wnh)
            .map(|((&v, &d), &w)| (v, d, w))
    }

    /// Snapshot TSV: `node_id<TAB>degree<TAB>wnh`, sorted by node id. WNH uses
    /// the shortest round-tripping decimal form.
    pub fn write_tsv<W: std::io::Write>(&self, mut out: W) -> Result<()> {
        for (v, d, w) in self.iter() {
            writeln!(out, "{v}\t{d}\t{w}")?;
        }
        Ok(())
    }
}

fn normalize_subset(graph: &CsrGraph, subset: &[NodeId]) -> Result<Vec<NodeId>> {
    let mut nodes = subset.to_vec();
    nodes.sort_unstable();
    nodes.dedup();
    if let Some(&last) = nodes.last() {
        if last as usize >= graph.num_nodes() {
            return Err(Error::out_of_range(last as u64, graph.num_nodes()));
        }
    }
    Ok(nodes)
}

/// WNH for every node of `subset`, computed node-parallel.
pub fn wnh_all(
    graph: &CsrGraph,
    labels: &LabelMatrix,
    probs: &EdgeProbabilities,
    subset: &[NodeId],
) -> Result<NodeMetrics> {
    check_labels(graph, labels)?;
    check_probs(graph, probs)?;
    let nodes = normalize_subset(graph, subset)?;
    let p = probs.values();
    let wnh: Vec<f64> = nodes
        .par_iter()
        .map(|&v| wnh_unchecked(graph, labels, p, v as usize))
        .collect();
    let degree = nodes.iter().map(|&v| graph.deg(v as usize)).collect();
    Ok(NodeMetrics { nodes, degree, wnh })
}

/// Unweighted counterpart of [`wnh_all`].
pub fn hete_all(graph: &CsrGraph, labels: &LabelMatrix, subset: &[NodeId]) -> Result<NodeMetrics> {
    check_labels(graph, labels)?;
    let nodes = normalize_subset(graph, subset)?;
    let wnh: Vec<f64> = nodes
        .par_iter()
        .map(|&v| hete_unchecked(graph, labels, v as usize))
        .collect();
    let degree = nodes.iter().map(|&v| graph.deg(v as usize)).collect();
    Ok(NodeMetrics { nodes, degree, wnh })
}

/// Number of items covered by `fraction` of `n`, rounded down.
pub(crate) fn count_for_fraction(fraction: f64, n: usize) -> usize {
    // guard against products like 0.07 * 100 = 7.000000000000001
    (((fraction * n as f64) + 1e-9).floor() as usize).min(n)
}

/// Split `count` ranked items into `buckets` ranges of `count / buckets`
/// items, the last bucket taking the remainder.
fn bucket_bounds(count: usize, buckets: usize) -> Vec<(usize, usize)> {
    let size = count / buckets;
    (0..buckets)
        .map(|b| {
            let start = b * size;
            let end = if b + 1 == buckets {
                count
            } else {
                start + size
            };
            (start, end)
        })
        .collect()
}

/// `nodes` sorted by degree descending, ties by ascending id.
fn rank_by_degree(graph: &CsrGraph, mut nodes: Vec<NodeId>) -> Vec<NodeId> {
    nodes.sort_by(|&a, &b| {
        graph
            .deg(b as usize)
            .cmp(&graph.deg(a as usize))
            .then(a.cmp(&b))
    });
    nodes
}

fn check_fraction(name: &str, f: f64) -> Result<()> {
    if !(f > 0.0 && f <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "{name} must lie in (0, 1], got {f}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantileBucket {
    pub index: usize,
    /// Bucket start as a fraction of the full ranked node list.
    pub start_fraction: f64,
    pub end_fraction: f64,
    pub nodes: usize,
    pub degree_sum: usize,
    /// `degree_sum` divided by the degree sum over all nodes.
    pub share: f64,
    pub avg_degree: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantileReport {
    pub num_nodes: usize,
    pub top_fraction: f64,
    pub tracked_nodes: usize,
    pub total_degree: usize,
    pub buckets: Vec<QuantileBucket>,
    /// Degree share of the nodes outside the tracked top fraction.
    pub untracked_share: f64,
}

impl QuantileReport {
    pub fn to_tsv(&self) -> String {
        let mut s = String::from(
            "bucket\tstart_fraction\tend_fraction\tnodes\tdegree_sum\tshare\tavg_degree\n",
        );
        for b in &self.buckets {
            let _ = writeln!(
                s,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                b.index,
                b.start_fraction,
                b.end_fraction,
                b.nodes,
                b.degree_sum,
                b.share,
                b.avg_degree
            );
        }
        s
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Degree mass carried by the highest-degree nodes, split into equal-count
/// buckets.
pub fn degree_quantiles(
    graph: &CsrGraph,
    top_fraction: f64,
    buckets: usize,
) -> Result<QuantileReport> {
    check_fraction("top_fraction", top_fraction)?;
    if buckets == 0 {
        return Err(Error::InvalidInput("buckets must be at least 1".into()));
    }
    let n = graph.num_nodes();
    let ranked = rank_by_degree(graph, (0..n).map(crate::graph::to_id).collect());
    let tracked = count_for_fraction(top_fraction, n);
    let total_degree = graph.targets().len();

    let mut tracked_sum = 0;
    let buckets = bucket_bounds(tracked, buckets)
        .into_iter()
        .enumerate()
        .map(|(index, (start, end))| {
            let degree_sum: usize = ranked[start..end]
                .iter()
                .map(|&v| graph.deg(v as usize))
                .sum();
            tracked_sum += degree_sum;
            QuantileBucket {
                index,
                start_fraction: ratio(start, n),
                end_fraction: ratio(end, n),
                nodes: end - start,
                degree_sum,
                share: ratio(degree_sum, total_degree),
                avg_degree: ratio(degree_sum, end - start),
            }
        })
        .collect();

    Ok(QuantileReport {
        num_nodes: n,
        top_fraction,
        tracked_nodes: tracked,
        total_degree,
        buckets,
        untracked_share: ratio(total_degree - tracked_sum, total_degree),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlapBucket {
    pub index: usize,
    pub start_fraction: f64,
    pub end_fraction: f64,
    /// High-WNH nodes falling in this degree bucket.
    pub count: usize,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlapReport {
    pub analyzed_nodes: usize,
    pub wnh_top_fraction: f64,
    pub degree_top_fraction: f64,
    pub top_wnh_count: usize,
    pub buckets: Vec<OverlapBucket>,
    /// Share of the high-WNH set outside the tracked degree region.
    pub outside_fraction: f64,
}

impl OverlapReport {
    pub fn to_tsv(&self) -> String {
        let mut s = String::from("bucket\tstart_fraction\tend_fraction\tcount\tfraction\n");
        for b in &self.buckets {
            let _ = writeln!(
                s,
                "{}\t{}\t{}\t{}\t{}",
                b.index, b.start_fraction, b.end_fraction, b.count, b.fraction
            );
        }
        s
    }
}

/// How the top-WNH nodes distribute over the degree buckets of the top
/// degree region. Both rankings are taken over the nodes in `metrics`.
pub fn overlap_report(
    metrics: &NodeMetrics,
    graph: &CsrGraph,
    wnh_top_fraction: f64,
    degree_top_fraction: f64,
    buckets: usize,
) -> Result<OverlapReport> {
    check_fraction("wnh_top_fraction", wnh_top_fraction)?;
    check_fraction("degree_top_fraction", degree_top_fraction)?;
    if buckets == 0 {
        return Err(Error::InvalidInput("buckets must be at least 1".into()));
    }
    if let Some(&last) = metrics.nodes.last() {
        if last as usize >= graph.num_nodes() {
            return Err(Error::Inconsistent(format!(
                "metrics cover node {last} but the graph has {} nodes",
                graph.num_nodes()
            )));
        }
    }
    let n = metrics.len();

    let mut by_wnh: Vec<usize> = (0..n).collect();
    by_wnh.sort_by(|&a, &b| {
        metrics.wnh[b]
            .total_cmp(&metrics.wnh[a])
            .then(metrics.nodes[a].cmp(&metrics.nodes[b]))
    });
    let top_wnh: Vec<NodeId> = by_wnh[..count_for_fraction(wnh_top_fraction, n)]
        .iter()
        .map(|&i| metrics.nodes[i])
        .collect();

    let ranked = rank_by_degree(graph, metrics.nodes.clone());
    let tracked = count_for_fraction(degree_top_fraction, n);
    // degree bucket of each analyzed node, if tracked
    let mut bucket_of = vec![usize::MAX; n];
    let bounds = bucket_bounds(tracked, buckets);
    for (b, &(start, end)) in bounds.iter().enumerate() {
        for &v in &ranked[start..end] {
            let i = metrics.position(v).expect("ranked nodes come from metrics");
            bucket_of[i] = b;
        }
    }

    let mut counts = vec![0usize; buckets];
    let mut outside = 0;
    for &v in &top_wnh {
        match bucket_of[metrics.position(v).expect("top nodes come from metrics")] {
            usize::MAX => outside += 1,
            b => counts[b] += 1,
        }
    }

    let total = top_wnh.len();
    Ok(OverlapReport {
        analyzed_nodes: n,
        wnh_top_fraction,
        degree_top_fraction,
        top_wnh_count: total,
        buckets: bounds
            .iter()
            .enumerate()
            .map(|(index, &(start, end))| OverlapBucket {
                index,
                start_fraction: ratio(start, n),
                end_fraction: ratio(end, n),
                count: counts[index],
                fraction: ratio(counts[index], total),
            })
            .collect(),
        outside_fraction: ratio(outside, total),
    })
}
