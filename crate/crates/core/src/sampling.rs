//! Random node sampling of subgraphs and the structural statistics used to
//! compare vanilla and low-redundancy graphs.
//!
//! All randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `seed_from_u64`. Sample `i` of a batch uses the master seed with stream
//! `i`, so batches are reproducible and independent of worker count.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{to_id, CsrGraph, NodeId, NodeIdMap};

pub const DEFAULT_DENSE_CAP: usize = 10_000;

fn sample_with(rng: &mut ChaCha8Rng, num_nodes: usize, budget: usize) -> Vec<NodeId> {
    let mut nodes: Vec<NodeId> = rand::seq::index::sample(rng, num_nodes, budget)
        .into_iter()
        .map(to_id)
        .collect();
    nodes.sort_unstable();
    nodes
}

fn check_budget(graph: &CsrGraph, budget: usize) -> Result<()> {
    if budget > graph.num_nodes() {
        return Err(Error::InvalidInput(format!(
            "budget {budget} exceeds the {} available nodes",
            graph.num_nodes()
        )));
    }
    Ok(())
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform sample of `budget` distinct nodes, ascending.
pub fn sample_nodes(graph: &CsrGraph, budget: usize, seed: u64) -> Result<Vec<NodeId>> {
    check_budget(graph, budget)?;
    Ok(sample_with(
        &mut stream_rng(seed, 0),
        graph.num_nodes(),
        budget,
    ))
}

/// Subgraph induced by [`sample_nodes`].
pub fn sample_subgraph(
    graph: &CsrGraph,
    budget: usize,
    seed: u64,
) -> Result<(CsrGraph, NodeIdMap)> {
    let nodes = sample_nodes(graph, budget, seed)?;
    graph.induced_subgraph(&nodes)
}

/// Dense symmetric matrix of shared-neighbor counts, zero diagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SharedNeighborMatrix {
    n: usize,
    data: Vec<u32>,
}

impl SharedNeighborMatrix {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, v: usize, u: usize) -> u32 {
        self.data[v * self.n + u]
    }

    pub fn row(&self, v: usize) -> &[u32] {
        &self.data[v * self.n..(v + 1) * self.n]
    }

    /// One tab-separated row per node.
    pub fn to_dense_tsv(&self) -> String {
        let mut s = String::with_capacity(self.n * self.n * 2);
        for v in 0..self.n {
            for (i, x) in self.row(v).iter().enumerate() {
                if i > 0 {
                    s.push('\t');
                }
                let _ = write!(s, "{x}");
            }
            s.push('\n');
        }
        s
    }

    /// `(v, u, count)` for `v < u` and `count > 0`, row-major.
    pub fn sparse_triples(&self) -> Vec<(usize, usize, u32)> {
        let mut out = Vec::new();
        for v in 0..self.n {
            for u in v + 1..self.n {
                let c = self.get(v, u);
                if c > 0 {
                    out.push((v, u, c));
                }
            }
        }
        out
    }
}

/// Shared-neighbor counts between every pair of nodes of `subgraph`.
///
/// Fails with a resource error when the graph has more than `cap` nodes.
pub fn shared_neighbors(subgraph: &CsrGraph, cap: usize) -> Result<SharedNeighborMatrix> {
    let n = subgraph.num_nodes();
    if n > cap {
        return Err(Error::ResourceLimit(format!(
            "dense shared-neighbor matrix over {n} nodes exceeds the cap of {cap}; \
             sample a smaller subgraph or raise the cap"
        )));
    }
    let mut data = vec![0u32; n * n];
    for w in 0..n {
        let nbrs = subgraph.adj(w);
        for (i, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[i + 1..] {
                data[a as usize * n + b as usize] += 1;
                data[b as usize * n + a as usize] += 1;
            }
        }
    }
    Ok(SharedNeighborMatrix { n, data })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Region {
    pub row: usize,
    pub col: usize,
    pub sum: u64,
}

/// Sums of every `window × window` block of the matrix (top-left corner at
/// `(row, col)`), sorted by sum descending then position ascending.
pub fn region_density(matrix: &SharedNeighborMatrix, window: usize) -> Result<Vec<Region>> {
    let n = matrix.dim();
    if window == 0 || window > n {
        return Err(Error::InvalidInput(format!(
            "window {window} must lie in [1, {n}]"
        )));
    }
    // 2-D prefix sums, (n+1) x (n+1)
    let w = n + 1;
    let mut pre = vec![0u64; w * w];
    for r in 0..n {
        for c in 0..n {
            pre[(r + 1) * w + c + 1] =
                matrix.get(r, c) as u64 + pre[r * w + c + 1] + pre[(r + 1) * w + c]
                    - pre[r * w + c];
        }
    }
    let mut regions = Vec::with_capacity((n - window + 1) * (n - window + 1));
    for r in 0..=n - window {
        for c in 0..=n - window {
            let (r2, c2) = (r + window, c + window);
            let sum = pre[r2 * w + c2] + pre[r * w + c] - pre[r * w + c2] - pre[r2 * w + c];
            regions.push(Region {
                row: r,
                col: c,
                sum,
            });
        }
    }
    regions.sort_by(|a, b| b.sum.cmp(&a.sum).then((a.row, a.col).cmp(&(b.row, b.col))));
    Ok(regions)
}

/// Number of triangles through each node.
pub fn local_triangles(graph: &CsrGraph) -> Vec<u64> {
    let mut tri = vec![0u64; graph.num_nodes()];
    for v in 0..graph.num_nodes() {
        let nv = graph.adj(v);
        for &u in nv.iter().filter(|&&u| u as usize > v) {
            let nu = graph.adj(u as usize);
            // common neighbors w > u
            let (mut i, mut j) = (0, 0);
            while i < nv.len() && j < nu.len() {
                match nv[i].cmp(&nu[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        let w = nv[i];
                        if w > u {
                            tri[v] += 1;
                            tri[u as usize] += 1;
                            tri[w as usize] += 1;
                        }
                        i += 1;
                        j += 1;
                    }
                }
            }
        }
    }
    tri
}

fn average_cc(graph: &CsrGraph, tri: &[u64]) -> f64 {
    let n = graph.num_nodes();
    if n == 0 {
        return 0.0;
    }
    let mut sum = 0.0;
    for (v, &t) in tri.iter().enumerate() {
        let d = graph.deg(v) as f64;
        if d >= 2.0 {
            sum += 2.0 * t as f64 / (d * (d - 1.0));
        }
    }
    sum / n as f64
}

/// Average local clustering coefficient; nodes of degree < 2 count as 0.
pub fn clustering_coefficient(graph: &CsrGraph) -> f64 {
    average_cc(graph, &local_triangles(graph))
}

/// Number of triangles, each counted once.
pub fn closed_triads(graph: &CsrGraph) -> u64 {
    local_triangles(graph).iter().sum::<u64>() / 3
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubgraphStats {
    pub clustering_coefficient: f64,
    pub closed_triads: u64,
}

pub fn subgraph_stats(graph: &CsrGraph) -> SubgraphStats {
    let tri = local_triangles(graph);
    SubgraphStats {
        clustering_coefficient: average_cc(graph, &tri),
        closed_triads: tri.iter().sum::<u64>() / 3,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchStats {
    pub num_samples: usize,
    pub budget: usize,
    pub seed: u64,
    pub mean_clustering_coefficient: f64,
    pub mean_closed_triads: f64,
}

/// Sampled subgraph number `index` of the batch seeded by `seed`.
pub fn batch_sample(
    graph: &CsrGraph,
    budget: usize,
    seed: u64,
    index: usize,
) -> Result<(CsrGraph, NodeIdMap)> {
    check_budget(graph, budget)?;
    let nodes = sample_with(
        &mut stream_rng(seed, index as u64),
        graph.num_nodes(),
        budget,
    );
    graph.induced_subgraph(&nodes)
}

/// Mean statistics over `num_samples` sampled subgraphs. Samples run in
/// parallel and are reduced in index order.
pub fn batch_stats(
    graph: &CsrGraph,
    budget: usize,
    num_samples: usize,
    seed: u64,
) -> Result<BatchStats> {
    check_budget(graph, budget)?;
    if num_samples == 0 {
        return Err(Error::InvalidInput("num_samples must be at least 1".into()));
    }
    let per_sample: Vec<SubgraphStats> = (0..num_samples)
        .into_par_iter()
        .map(|i| {
            let (sub, _) = batch_sample(graph, budget, seed, i)?;
            Ok(subgraph_stats(&sub))
        })
        .collect::<Result<_>>()?;
    let mut cc = 0.0;
    let mut triads = 0.0;
    for s in &per_sample {
        cc += s.clustering_coefficient;
        triads += s.closed_triads as f64;
    }
    Ok(BatchStats {
        num_samples,
        budget,
        seed,
        mean_clustering_coefficient: cc / num_samples as f64,
        mean_closed_triads: triads / num_samples as f64,
    })
}
