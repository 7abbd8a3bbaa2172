mod common;

use std::collections::HashMap;

use dropreef_core::probs::read_probs;
use dropreef_core::{
    hete_all, uniform_probs, wnh, wnh_all, CsrGraph, EdgeProbabilities, LabelMatrix, LabelMode,
    NodeId,
};
use proptest::prelude::*;

const SQRT2: f64 = std::f64::consts::SQRT_2;

#[derive(Debug, Clone)]
struct Instance {
    n: usize,
    edges: Vec<(NodeId, NodeId)>,
    num_classes: usize,
    rows: Vec<Vec<u32>>,
    multi: bool,
    /// probability keyed by (min, max) endpoint
    probs: HashMap<(usize, usize), f64>,
}

impl Instance {
    fn graph(&self) -> CsrGraph {
        CsrGraph::from_edges(&self.edges, self.n).unwrap()
    }

    fn labels(&self) -> LabelMatrix {
        let mode = if self.multi {
            LabelMode::MultiClass
        } else {
            LabelMode::SingleClass
        };
        LabelMatrix::from_rows(self.rows.clone(), self.num_classes, mode).unwrap()
    }

    fn dense_labels(&self) -> Vec<Vec<f64>> {
        self.rows
            .iter()
            .map(|r| {
                let mut d = vec![0.0; self.num_classes];
                for &c in r {
                    d[c as usize] = 1.0;
                }
                d
            })
            .collect()
    }

    fn edge_probs(&self, g: &CsrGraph) -> EdgeProbabilities {
        let mut text = String::new();
        for (&(u, v), p) in &self.probs {
            text.push_str(&format!("{u} {v} {p}\n"));
        }
        read_probs(text.as_bytes(), "mem", g).unwrap()
    }

    fn prob(&self, v: usize, u: usize) -> f64 {
        self.probs[&(v.min(u), v.max(u))]
    }
}

fn instance(max_nodes: usize) -> impl Strategy<Value = Instance> {
    (2..=max_nodes, 1..=6usize, any::<bool>()).prop_flat_map(|(n, num_classes, multi)| {
        let id = 0..n as NodeId;
        let row = if multi {
            prop::collection::vec(0..num_classes as u32, 0..=num_classes).boxed()
        } else {
            (0..num_classes as u32).prop_map(|c| vec![c]).boxed()
        };
        (
            prop::collection::vec((id.clone(), id), 0..=4 * n),
            prop::collection::vec(row, n),
            prop::collection::vec(0.0..=1.0f64, 4 * n),
        )
            .prop_map(move |(edges, rows, ps)| {
                let mut probs = HashMap::new();
                for (i, &(u, v)) in edges.iter().enumerate() {
                    if u != v {
                        let key = (u.min(v) as usize, u.max(v) as usize);
                        probs.entry(key).or_insert(ps[i]);
                    }
                }
                Instance {
                    n,
                    edges,
                    num_classes,
                    rows,
                    multi,
                    probs,
                }
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn wnh_all_matches_double_loop_oracle(inst in instance(50)) {
        let g = inst.graph();
        let labels = inst.labels();
        let probs = inst.edge_probs(&g);
        let all: Vec<NodeId> = (0..inst.n as NodeId).collect();
        let m = wnh_all(&g, &labels, &probs, &all).unwrap();
        let oracle = common::naive_wnh(
            &common::adjacency(&inst.edges, inst.n),
            &inst.dense_labels(),
            &|v, u| inst.prob(v, u),
        );
        for (v, &w) in m.wnh_values().iter().enumerate() {
            prop_assert!((w - oracle[v]).abs() <= 1e-12, "node {}: {} vs {}", v, w, oracle[v]);
            prop_assert_eq!(w, wnh(&g, &labels, &probs, v as NodeId).unwrap());
        }
    }

    #[test]
    fn bounds_hold(inst in instance(50)) {
        let g = inst.graph();
        let labels = inst.labels();
        let all: Vec<NodeId> = (0..inst.n as NodeId).collect();
        let probs = inst.edge_probs(&g);
        let weighted = wnh_all(&g, &labels, &probs, &all).unwrap();
        let plain = wnh_all(&g, &labels, &uniform_probs(&g), &all).unwrap();
        let bound = if inst.multi { (inst.num_classes as f64).sqrt() } else { SQRT2 };
        let dense = inst.dense_labels();
        for v in 0..inst.n {
            let w = weighted.wnh_values()[v];
            prop_assert!(w >= 0.0);
            prop_assert!(plain.wnh_values()[v] <= bound + 1e-12);
            // max p times max pairwise distance over v's neighbors
            let (mut max_p, mut max_d) = (0.0f64, 0.0f64);
            for &u in g.adj(v) {
                max_p = max_p.max(inst.prob(v, u as usize));
                max_d = max_d.max(common::dense_distance(&dense[v], &dense[u as usize]));
            }
            prop_assert!(w <= max_p * max_d + 1e-12);
        }
    }

    #[test]
    fn uniform_reduces_to_hete_bit_exactly(inst in instance(50)) {
        let g = inst.graph();
        let labels = inst.labels();
        let all: Vec<NodeId> = (0..inst.n as NodeId).collect();
        let w = wnh_all(&g, &labels, &uniform_probs(&g), &all).unwrap();
        let h = hete_all(&g, &labels, &all).unwrap();
        prop_assert_eq!(w.wnh_values(), h.wnh_values());
    }

    #[test]
    fn scaling_one_nodes_probabilities_scales_its_wnh(inst in instance(30), lambda in 0.0..=1.0f64) {
        let g = inst.graph();
        let labels = inst.labels();
        let probs = inst.edge_probs(&g);
        for v in 0..inst.n {
            // scale only v's incident edges
            let mut values = probs.values().to_vec();
            for slot in g.slot_range(v) {
                values[slot] *= lambda;
                let u = g.targets()[slot];
                let back = g.find_slot(u, v as NodeId).unwrap();
                values[back] = values[slot];
            }
            let scaled = EdgeProbabilities::from_slots(&g, values).unwrap();
            let before = wnh(&g, &labels, &probs, v as NodeId).unwrap();
            let after = wnh(&g, &labels, &scaled, v as NodeId).unwrap();
            prop_assert!((after - lambda * before).abs() <= 1e-12);
        }
    }

    #[test]
    fn parallelism_does_not_change_bits(inst in instance(50)) {
        let g = inst.graph();
        let labels = inst.labels();
        let probs = inst.edge_probs(&g);
        let all: Vec<NodeId> = (0..inst.n as NodeId).collect();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let many = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| wnh_all(&g, &labels, &probs, &all).unwrap());
        let b = many.install(|| wnh_all(&g, &labels, &probs, &all).unwrap());
        let bits = |m: &dropreef_core::NodeMetrics| m.wnh_values().iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        prop_assert_eq!(bits(&a), bits(&b));
    }
}

#[test]
fn closed_form_in_the_number_of_differing_neighbors() {
    for degree in 1..=20usize {
        for diff in 0..=degree {
            let edges: Vec<(NodeId, NodeId)> = (1..=degree).map(|l| (0, l as NodeId)).collect();
            let g = CsrGraph::from_edges(&edges, degree + 1).unwrap();
            let mut classes = vec![0u32; degree + 1];
            for c in classes.iter_mut().skip(1).take(diff) {
                *c = 1;
            }
            let labels = LabelMatrix::single_class(&classes, 2).unwrap();
            let h = dropreef_core::hete(&g, &labels, 0).unwrap();
            assert!((h - SQRT2 * diff as f64 / degree as f64).abs() <= 1e-12);
        }
    }
}

#[test]
fn weighting_separates_equidistant_neighbors() {
    let g = CsrGraph::from_edges(&[(0, 1), (0, 2)], 3).unwrap();
    let labels = LabelMatrix::from_rows(
        vec![vec![2u32, 3], vec![0, 1], vec![4, 5]],
        6,
        LabelMode::MultiClass,
    )
    .unwrap();
    assert_eq!(labels.distance(0, 1), 2.0);
    assert_eq!(labels.distance(0, 2), 2.0);
    for (pu, pm) in [(0.1, 0.2), (0.9, 0.3), (1.0, 0.0)] {
        let text = format!("0 1 {pu}\n0 2 {pm}\n");
        let p = read_probs(text.as_bytes(), "mem", &g).unwrap();
        let tu = p.get(&g, 0, 1).unwrap() * labels.distance(0, 1);
        let tm = p.get(&g, 0, 2).unwrap() * labels.distance(0, 2);
        assert_ne!(tu, tm);
    }
}
