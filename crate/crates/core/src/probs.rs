//! Per-edge linking probabilities used to weight neighbor heterophily.
//!
//! Values live in an array parallel to [`CsrGraph::targets`], one entry per
//! directed slot, and are always symmetric across the two slots of an edge.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{to_id, CsrGraph, NodeId, NodeIdMap};

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeProbabilities {
    values: Vec<f64>,
}

impl EdgeProbabilities {
    /// Wrap a slot-aligned array, checking length, range and symmetry.
    pub fn from_slots(graph: &CsrGraph, values: Vec<f64>) -> Result<Self> {
        let probs = Self { values };
        probs.validate(graph)?;
        Ok(probs)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Probability on edge `v -> u`, if it exists.
    pub fn get(&self, graph: &CsrGraph, v: NodeId, u: NodeId) -> Option<f64> {
        graph.find_slot(v, u).map(|s| self.values[s])
    }

    pub fn is_uniform(&self) -> bool {
        self.values.iter().all(|&p| p == 1.0)
    }

    pub fn validate(&self, graph: &CsrGraph) -> Result<()> {
        if self.values.len() != graph.targets().len() {
            return Err(Error::CountMismatch {
                what: "edge probability slots".into(),
                expected: graph.targets().len(),
                actual: self.values.len(),
            });
        }
        for v in 0..graph.num_nodes() {
            for slot in graph.slot_range(v) {
                let p = self.values[slot];
                let u = graph.targets()[slot];
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::InvalidInput(format!(
                        "probability {p} on edge ({v}, {u}) outside [0, 1]"
                    )));
                }
                let back = graph
                    .find_slot(u, to_id(v))
                    .expect("graph symmetry checked at construction");
                if self.values[back] != p {
                    return Err(Error::InvalidInput(format!(
                        "asymmetric probabilities on edge ({v}, {u}): {p} vs {}",
                        self.values[back]
                    )));
                }
            }
        }
        Ok(())
    }

    /// Probabilities aligned with `new_graph`, which must be a node- or
    /// edge-restriction of `old_graph` under `map`.
    pub fn remap(&self, old_graph: &CsrGraph, new_graph: &CsrGraph, map: &NodeIdMap) -> Self {
        let mut values = Vec::with_capacity(new_graph.targets().len());
        for v in 0..new_graph.num_nodes() {
            let old_v = map.old_id(to_id(v));
            for &u in new_graph.adj(v) {
                let slot = old_graph
                    .find_slot(old_v, map.old_id(u))
                    .expect("remapped edge must exist in the source graph");
                values.push(self.values[slot]);
            }
        }
        Self { values }
    }

    /// Write one `u v p` record per undirected edge (`u < v`), ascending.
    pub fn write_records<W: Write>(&self, graph: &CsrGraph, mut out: W) -> Result<()> {
        for v in 0..graph.num_nodes() {
            for slot in graph.slot_range(v) {
                let u = graph.targets()[slot];
                if u as usize > v {
                    writeln!(out, "{v} {u} {}", self.values[slot])?;
                }
            }
        }
        Ok(())
    }
}

/// Every edge weighted 1.0, which makes WNH coincide with plain neighbor
/// heterophily.
pub fn uniform_probs(graph: &CsrGraph) -> EdgeProbabilities {
    EdgeProbabilities {
        values: vec![1.0; graph.targets().len()],
    }
}

/// Load a `u v p` record file. See [`read_probs`].
pub fn load_probs(path: impl AsRef<Path>, graph: &CsrGraph) -> Result<EdgeProbabilities> {
    let path = path.as_ref();
    let file = File::open(path)?;
    read_probs(BufReader::new(file), &path.display().to_string(), graph)
}

/// Parse probability records. Each record fills both directed slots of its
/// edge; edges with no record default to 1.0. Blank lines and lines starting
/// with `#` are skipped.
pub fn read_probs<R: BufRead>(
    reader: R,
    source_name: &str,
    graph: &CsrGraph,
) -> Result<EdgeProbabilities> {
    let mut values = vec![1.0; graph.targets().len()];
    let mut seen = vec![false; graph.targets().len()];
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let (Some(a), Some(b), Some(c), None) =
            (fields.next(), fields.next(), fields.next(), fields.next())
        else {
            return Err(Error::parse(source_name, lineno, "expected `u v p`"));
        };
        let u: NodeId = a
            .parse()
            .map_err(|_| Error::parse(source_name, lineno, format!("bad node id {a:?}")))?;
        let v: NodeId = b
            .parse()
            .map_err(|_| Error::parse(source_name, lineno, format!("bad node id {b:?}")))?;
        let p: f64 = c
            .parse()
            .map_err(|_| Error::parse(source_name, lineno, format!("bad probability {c:?}")))?;
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::parse(
                source_name,
                lineno,
                format!("probability {p} outside [0, 1]"),
            ));
        }
        let (Some(fwd), Some(back)) = (graph.find_slot(u, v), graph.find_slot(v, u)) else {
            return Err(Error::parse(
                source_name,
                lineno,
                format!("record ({u}, {v}) is not an edge of the graph"),
            ));
        };
        if seen[fwd] && values[fwd] != p {
            return Err(Error::parse(
                source_name,
                lineno,
                format!(
                    "conflicting probability for edge ({u}, {v}): {} then {p}",
                    values[fwd]
                ),
            ));
        }
        values[fwd] = p;
        values[back] = p;
        seen[fwd] = true;
        seen[back] = true;
    }
    Ok(EdgeProbabilities { values })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Heuristic {
    Jaccard,
    CommonNeighbors,
}

impl FromStr for Heuristic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jaccard" => Ok(Heuristic::Jaccard),
            "common-neighbors" => Ok(Heuristic::CommonNeighbors),
            other => Err(Error::InvalidInput(format!(
                "unknown heuristic {other:?} (expected jaccard or common-neighbors)"
            ))),
        }
    }
}

/// Sizes of `N(v) ∩ N(u)` and `(N(v) ∖ {u}) ∪ (N(u) ∖ {v})`.
fn overlap(a: &[NodeId], b: &[NodeId], v: NodeId, u: NodeId) -> (usize, usize) {
    let (mut i, mut j, mut common) = (0, 0, 0usize);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                common += 1;
                i += 1;
                j += 1;
            }
        }
    }
    // a contains u and b contains v; neither endpoint is a common neighbor
    debug_assert!(a.binary_search(&u).is_ok() && b.binary_search(&v).is_ok());
    let union = (a.len() - 1) + (b.len() - 1) - common;
    (common, union)
}

/// Deterministic link scores derived from neighborhood overlap.
///
/// Jaccard uses `|N(v) ∩ N(u)| / |(N(v) ∖ {u}) ∪ (N(u) ∖ {v})|` with 0 for an
/// empty union. Common-neighbors divides the intersection size by its maximum
/// over all edges, yielding all zeros when no edge has a common neighbor.
pub fn heuristic_probs(graph: &CsrGraph, method: Heuristic) -> EdgeProbabilities {
    let per_node: Vec<Vec<(usize, usize)>> = (0..graph.num_nodes())
        .into_par_iter()
        .map(|v| {
            let nv = graph.adj(v);
            nv.iter()
                .map(|&u| overlap(nv, graph.adj(u as usize), to_id(v), u))
                .collect()
        })
        .collect();
    let counts: Vec<(usize, usize)> = per_node.into_iter().flatten().collect();

    let values = match method {
        Heuristic::Jaccard => counts
            .iter()
            .map(|&(common, union)| {
                if union == 0 {
                    0.0
                } else {
                    common as f64 / union as f64
                }
            })
            .collect(),
        Heuristic::CommonNeighbors => {
            let max = counts.iter().map(|&(c, _)| c).max().unwrap_or(0);
            counts
                .iter()
                .map(|&(c, _)| if max == 0 { 0.0 } else { c as f64 / max as f64 })
                .collect()
        }
    };
    EdgeProbabilities { values }
}
