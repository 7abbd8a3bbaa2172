//! Brute-force oracles. They work from the raw input pairs and dense label
//! vectors, never from the CSR structures under test.

#![allow(dead_code)]

use std::collections::BTreeSet;

use dropreef_core::NodeId;

/// Adjacency sets built straight from the input pairs.
pub fn adjacency(edges: &[(NodeId, NodeId)], n: usize) -> Vec<BTreeSet<usize>> {
    let mut adj = vec![BTreeSet::new(); n];
    for &(u, v) in edges {
        let (u, v) = (u as usize, v as usize);
        if u != v {
            adj[u].insert(v);
            adj[v].insert(u);
        }
    }
    adj
}

pub fn edge_count(adj: &[BTreeSet<usize>]) -> usize {
    adj.iter().map(|s| s.len()).sum::<usize>() / 2
}

pub fn dense_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..a.len() {
        s += (a[i] - b[i]).powi(2);
    }
    s.sqrt()
}

/// Double loop over all node pairs: WNH_v = Σ_{u adjacent} p(v,u)·‖c_v − c_u‖ / D_v.
pub fn naive_wnh(
    adj: &[BTreeSet<usize>],
    labels: &[Vec<f64>],
    prob: &dyn Fn(usize, usize) -> f64,
) -> Vec<f64> {
    let n = adj.len();
    (0..n)
        .map(|v| {
            let mut sum = 0.0;
            let mut deg = 0usize;
            for u in 0..n {
                if adj[v].contains(&u) {
                    sum += prob(v, u) * dense_distance(&labels[v], &labels[u]);
                    deg += 1;
                }
            }
            if deg == 0 {
                0.0
            } else {
                sum / deg as f64
            }
        })
        .collect()
}

/// Exhaustive enumeration of node triples.
pub fn triangles_by_triples(adj: &[BTreeSet<usize>]) -> (u64, Vec<u64>) {
    let n = adj.len();
    let mut per_node = vec![0u64; n];
    let mut total = 0;
    for a in 0..n {
        for b in a + 1..n {
            if !adj[a].contains(&b) {
                continue;
            }
            for c in b + 1..n {
                if adj[a].contains(&c) && adj[b].contains(&c) {
                    total += 1;
                    per_node[a] += 1;
                    per_node[b] += 1;
                    per_node[c] += 1;
                }
            }
        }
    }
    (total, per_node)
}

/// Average local clustering coefficient by counting closed neighbor pairs.
pub fn clustering_by_pairs(adj: &[BTreeSet<usize>]) -> f64 {
    let n = adj.len();
    if n == 0 {
        return 0.0;
    }
    let mut sum = 0.0;
    for v in 0..n {
        let nb: Vec<usize> = adj[v].iter().copied().collect();
        let d = nb.len();
        if d < 2 {
            continue;
        }
        let mut closed = 0;
        for i in 0..d {
            for j in i + 1..d {
                if adj[nb[i]].contains(&nb[j]) {
                    closed += 1;
                }
            }
        }
        sum += closed as f64 / (d * (d - 1) / 2) as f64;
    }
    sum / n as f64
}
