//! Undirected simple graphs in compressed sparse row form.
//!
//! Every node's neighbor list is sorted ascending and deduplicated, the
//! adjacency is symmetric and self-loops never appear. All constructors in
//! this module establish those invariants; [`CsrGraph::validate`] re-checks
//! them by a direct scan.

use std::ops::Range;

use crate::error::{Error, Result};

/// Node identifier. 32 bits by default, 64 bits with the `wide-ids` feature.
#[cfg(not(feature = "wide-ids"))]
pub type NodeId = u32;
/// Node identifier. 32 bits by default, 64 bits with the `wide-ids` feature.
#[cfg(feature = "wide-ids")]
pub type NodeId = u64;

#[inline]
pub(crate) fn to_id(v: usize) -> NodeId {
    v as NodeId
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsrGraph {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
}

impl CsrGraph {
    /// Graph with `num_nodes` isolated nodes.
    pub fn empty(num_nodes: usize) -> Self {
        Self {
            offsets: vec![0; num_nodes + 1],
            targets: Vec::new(),
        }
    }

    /// Build a graph from arbitrary `(u, v)` pairs.
    ///
    /// Each pair contributes both directions. Self-loops are discarded and
    /// repeated pairs collapse to a single undirected edge.
    pub fn from_edges(edges: &[(NodeId, NodeId)], num_nodes: usize) -> Result<Self> {
        for (i, &(u, v)) in edges.iter().enumerate() {
            if u as usize >= num_nodes || v as usize >= num_nodes {
                return Err(Error::InvalidInput(format!(
                    "edge #{i} ({u}, {v}) references a node outside [0, {num_nodes})"
                )));
            }
        }

        let mut counts = vec![0usize; num_nodes + 1];
        for &(u, v) in edges {
            if u != v {
                counts[u as usize + 1] += 1;
                counts[v as usize + 1] += 1;
            }
        }
        for i in 1..counts.len() {
            counts[i] += counts[i - 1];
        }
        let raw_offsets = counts;
        let mut cursor = raw_offsets.clone();
        let mut raw = vec![0 as NodeId; raw_offsets[num_nodes]];
        for &(u, v) in edges {
            if u != v {
                raw[cursor[u as usize]] = v;
                cursor[u as usize] += 1;
                raw[cursor[v as usize]] = u;
                cursor[v as usize] += 1;
            }
        }

        let mut offsets = Vec::with_capacity(num_nodes + 1);
        offsets.push(0);
        let mut targets = Vec::with_capacity(raw.len());
        for v in 0..num_nodes {
            let row = &mut raw[raw_offsets[v]..raw_offsets[v + 1]];
            row.sort_unstable();
            let mut last = None;
            for &u in row.iter() {
                if last != Some(u) {
                    targets.push(u);
                    last = Some(u);
                }
            }
            offsets.push(targets.len());
        }

        Ok(Self { offsets, targets })
    }

    /// Assemble a graph from raw CSR arrays, rejecting anything that breaks
    /// the structural invariants.
    pub fn from_parts(offsets: Vec<usize>, targets: Vec<NodeId>) -> Result<Self> {
        let graph = Self { offsets, targets };
        graph.validate()?;
        Ok(graph)
    }

    pub fn num_nodes(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of undirected edges.
    pub fn num_edges(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn targets(&self) -> &[NodeId] {
        &self.targets
    }

    fn check(&self, v: NodeId) -> Result<usize> {
        let idx = v as usize;
        if idx >= self.num_nodes() {
            return Err(Error::out_of_range(v as u64, self.num_nodes()));
        }
        Ok(idx)
    }

    pub fn degree(&self, v: NodeId) -> Result<usize> {
        let v = self.check(v)?;
        Ok(self.deg(v))
    }

    pub fn neighbors(&self, v: NodeId) -> Result<&[NodeId]> {
        let v = self.check(v)?;
        Ok(self.adj(v))
    }

    /// Neighbor slice without a range check. Panics when `v` is out of range.
    #[inline]
    pub fn adj(&self, v: usize) -> &[NodeId] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Degree without a range check. Panics when `v` is out of range.
    #[inline]
    pub fn deg(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Positions of `v`'s directed slots in [`CsrGraph::targets`].
    #[inline]
    pub fn slot_range(&self, v: usize) -> Range<usize> {
        self.offsets[v]..self.offsets[v + 1]
    }

    /// Index of the directed slot `v -> u`, if the edge exists.
    pub fn find_slot(&self, v: NodeId, u: NodeId) -> Option<usize> {
        let vi = v as usize;
        if vi >= self.num_nodes() {
            return None;
        }
        self.adj(vi)
            .binary_search(&u)
            .ok()
            .map(|pos| self.offsets[vi] + pos)
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.find_slot(u, v).is_some()
    }

    /// Undirected edges as `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        (0..self.num_nodes()).flat_map(move |v| {
            let vid = to_id(v);
            self.adj(v)
                .iter()
                .copied()
                .filter(move |&u| u > vid)
                .map(move |u| (vid, u))
        })
    }

    /// Check every structural invariant by a direct scan.
    pub fn validate(&self) -> Result<()> {
        let n = self
            .offsets
            .len()
            .checked_sub(1)
            .ok_or_else(|| Error::Format("offsets array is empty".into()))?;
        if self.offsets[0] != 0 {
            return Err(Error::Format("offsets[0] must be 0".into()));
        }
        if self.offsets[n] != self.targets.len() {
            return Err(Error::Format(format!(
                "offsets[{n}] = {} but targets has {} entries",
                self.offsets[n],
                self.targets.len()
            )));
        }
        if self.offsets.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Format("offsets are not non-decreasing".into()));
        }
        for v in 0..n {
            let row = self.adj(v);
            for (i, &u) in row.iter().enumerate() {
                if u as usize >= n {
                    return Err(Error::Format(format!(
                        "node {v} lists out-of-range neighbor {u}"
                    )));
                }
                if u as usize == v {
                    return Err(Error::Format(format!("node {v} has a self-loop")));
                }
                if i > 0 && row[i - 1] >= u {
                    return Err(Error::Format(format!(
                        "neighbor list of node {v} is not strictly ascending"
                    )));
                }
                if self.adj(u as usize).binary_search(&to_id(v)).is_err() {
                    return Err(Error::Format(format!(
                        "edge {v} -> {u} has no reverse edge"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Drop `nodes` together with every incident edge; survivors are
    /// renumbered contiguously in ascending original order.
    pub fn remove_nodes(&self, nodes: &[NodeId]) -> Result<(CsrGraph, NodeIdMap)> {
        let mut keep = vec![true; self.num_nodes()];
        for &v in nodes {
            keep[self.check(v)?] = false;
        }
        Ok(self.restrict(&keep))
    }

    /// Subgraph induced by `nodes` (duplicates ignored), renumbered contiguously
    /// in ascending original order.
    pub fn induced_subgraph(&self, nodes: &[NodeId]) -> Result<(CsrGraph, NodeIdMap)> {
        let mut keep = vec![false; self.num_nodes()];
        for &v in nodes {
            keep[self.check(v)?] = true;
        }
        Ok(self.restrict(&keep))
    }

    pub(crate) fn restrict(&self, keep: &[bool]) -> (CsrGraph, NodeIdMap) {
        debug_assert_eq!(keep.len(), self.num_nodes());
        let map = NodeIdMap::from_mask(keep);
        let mut offsets = Vec::with_capacity(map.num_retained() + 1);
        offsets.push(0);
        let mut targets = Vec::new();
        for &old in map.inverse() {
            // renumbering is monotone, so filtered rows stay sorted
            targets.extend(self.adj(old as usize).iter().filter_map(|&u| map.new_id(u)));
            offsets.push(targets.len());
        }
        (CsrGraph { offsets, targets }, map)
    }

    /// Same node set, keeping only the edges for which `keep(u, v)` holds.
    /// The predicate must be symmetric.
    pub fn retain_edges<F>(&self, mut keep: F) -> CsrGraph
    where
        F: FnMut(NodeId, NodeId) -> bool,
    {
        let mut offsets = Vec::with_capacity(self.offsets.len());
        offsets.push(0);
        let mut targets = Vec::with_capacity(self.targets.len());
        for v in 0..self.num_nodes() {
            let vid = to_id(v);
            targets.extend(self.adj(v).iter().copied().filter(|&u| keep(vid, u)));
            offsets.push(targets.len());
        }
        CsrGraph { offsets, targets }
    }
}

/// Bijection between the retained original ids and `0..num_retained`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeIdMap {
    forward: Vec<Option<NodeId>>,
    inverse: Vec<NodeId>,
}

impl NodeIdMap {
    pub fn identity(num_nodes: usize) -> Self {
        Self {
            forward: (0..num_nodes).map(|v| Some(to_id(v))).collect(),
            inverse: (0..num_nodes).map(to_id).collect(),
        }
    }

    pub fn from_mask(keep: &[bool]) -> Self {
        let mut forward = Vec::with_capacity(keep.len());
        let mut inverse = Vec::new();
        for (old, &k) in keep.iter().enumerate() {
            if k {
                forward.push(Some(to_id(inverse.len())));
                inverse.push(to_id(old));
            } else {
                forward.push(None);
            }
        }
        Self { forward, inverse }
    }

    /// New id of an original node, `None` if it was not retained.
    pub fn new_id(&self, old: NodeId) -> Option<NodeId> {
        self.forward.get(old as usize).copied().flatten()
    }

    /// Original id of a retained node. Panics if `new` is out of range.
    pub fn old_id(&self, new: NodeId) -> NodeId {
        self.inverse[new as usize]
    }

    pub fn num_original(&self) -> usize {
        self.forward.len()
    }

    pub fn num_retained(&self) -> usize {
        self.inverse.len()
    }

    /// Original ids of retained nodes, indexed by new id.
    pub fn inverse(&self) -> &[NodeId] {
        &self.inverse
    }

    pub fn is_identity(&self) -> bool {
        self.forward.len() == self.inverse.len()
            && self
                .inverse
                .iter()
                .enumerate()
                .all(|(i, &o)| o as usize == i)
    }
}
