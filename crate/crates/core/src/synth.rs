//! Seeded synthetic graphs for tests, diagnostics and benchmarks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{to_id, CsrGraph, NodeId};
use crate::labels::LabelMatrix;

/// Parameters of a community graph with planted heterophilic hubs.
#[derive(Debug, Clone, Copy)]
pub struct PlantedHubs {
    pub num_nodes: usize,
    pub num_hubs: usize,
    pub num_classes: usize,
    pub community_size: usize,
    /// Probability of each extra intra-community edge (on top of a ring).
    pub intra_prob: f64,
    /// Non-hub neighbors attached to every hub.
    pub hub_fanout: usize,
    /// Probability of an edge between two hubs of different classes.
    pub hub_link_prob: f64,
}

impl Default for PlantedHubs {
    fn default() -> Self {
        Self {
            num_nodes: 10_000,
            num_hubs: 100,
            num_classes: 10,
            community_size: 50,
            intra_prob: 0.3,
            hub_fanout: 400,
            hub_link_prob: 0.5,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PlantedGraph {
    pub graph: CsrGraph,
    pub labels: LabelMatrix,
    /// Hub ids, ascending.
    pub hubs: Vec<NodeId>,
}

impl PlantedHubs {
    /// Non-hub nodes form homophilic communities (a ring plus random chords,
    /// one class per community). Every hub links only to nodes of other
    /// classes, so its neighbor heterophily is maximal while every non-hub
    /// keeps at least two same-class neighbors.
    pub fn generate(&self, seed: u64) -> PlantedGraph {
        assert!(self.num_hubs < self.num_nodes);
        assert!(self.community_size >= 3 && self.num_classes >= 2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);

        let mut ids: Vec<NodeId> = (0..self.num_nodes).map(to_id).collect();
        ids.shuffle(&mut rng);
        let mut hubs = ids[..self.num_hubs].to_vec();
        let mut members = ids[self.num_hubs..].to_vec();
        hubs.sort_unstable();
        members.sort_unstable();

        let mut class = vec![0u32; self.num_nodes];
        let mut edges = Vec::new();
        for (c, community) in members.chunks(self.community_size).enumerate() {
            let label = (c % self.num_classes) as u32;
            for &v in community {
                class[v as usize] = label;
            }
            let k = community.len();
            if k >= 3 {
                for i in 0..k {
                    edges.push((community[i], community[(i + 1) % k]));
                }
            } else if k == 2 {
                edges.push((community[0], community[1]));
            }
            for i in 0..k {
                for j in i + 2..k {
                    if rng.gen_bool(self.intra_prob) {
                        edges.push((community[i], community[j]));
                    }
                }
            }
        }

        for &h in &hubs {
            class[h as usize] = rng.gen_range(0..self.num_classes as u32);
        }
        for &h in &hubs {
            let hc = class[h as usize];
            let eligible: Vec<NodeId> = members
                .iter()
                .copied()
                .filter(|&v| class[v as usize] != hc)
                .collect();
            let fanout = self.hub_fanout.min(eligible.len());
            for i in rand::seq::index::sample(&mut rng, eligible.len(), fanout) {
                edges.push((h, eligible[i]));
            }
        }
        for (i, &a) in hubs.iter().enumerate() {
            for &b in &hubs[i + 1..] {
                if class[a as usize] != class[b as usize] && rng.gen_bool(self.hub_link_prob) {
                    edges.push((a, b));
                }
            }
        }

        let graph = CsrGraph::from_edges(&edges, self.num_nodes).expect("ids are in range");
        let labels =
            LabelMatrix::single_class(&class, self.num_classes).expect("classes are in range");
        PlantedGraph {
            graph,
            labels,
            hubs,
        }
    }
}

/// Graph with `num_edges` uniformly random pairs (self-loops and repeats
/// collapse, so the result may have slightly fewer edges).
pub fn random_graph(num_nodes: usize, num_edges: usize, seed: u64) -> CsrGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges: Vec<(NodeId, NodeId)> = (0..num_edges)
        .map(|_| {
            (
                to_id(rng.gen_range(0..num_nodes)),
                to_id(rng.gen_range(0..num_nodes)),
            )
        })
        .collect();
    CsrGraph::from_edges(&edges, num_nodes).expect("ids are in range")
}

/// Uniformly random single-class labels.
pub fn random_labels(num_nodes: usize, num_classes: usize, seed: u64) -> LabelMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let classes: Vec<u32> = (0..num_nodes)
        .map(|_| rng.gen_range(0..num_classes as u32))
        .collect();
    LabelMatrix::single_class(&classes, num_classes).expect("classes are in range")
}
