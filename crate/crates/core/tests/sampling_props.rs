mod common;

use std::collections::BTreeSet;

use dropreef_core::sampling::{batch_sample, local_triangles, subgraph_stats};
use dropreef_core::{
    batch_stats, closed_triads, clustering_coefficient, region_density, sample_nodes,
    sample_subgraph, shared_neighbors, CsrGraph, NodeId,
};
use proptest::prelude::*;

fn edges_strategy(
    max_nodes: usize,
    max_edges: usize,
) -> impl Strategy<Value = (usize, Vec<(NodeId, NodeId)>)> {
    (1..=max_nodes).prop_flat_map(move |n| {
        let id = 0..n as NodeId;
        (
            Just(n),
            prop::collection::vec((id.clone(), id), 0..=max_edges),
        )
    })
}

fn cycle(n: usize) -> CsrGraph {
    let edges: Vec<(NodeId, NodeId)> = (0..n)
        .map(|i| (i as NodeId, ((i + 1) % n) as NodeId))
        .collect();
    CsrGraph::from_edges(&edges, n).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shared_neighbors_match_pairwise_intersection((n, edges) in edges_strategy(200, 800)) {
        let g = CsrGraph::from_edges(&edges, n).unwrap();
        let adj = common::adjacency(&edges, n);
        let m = shared_neighbors(&g, 10_000).unwrap();
        prop_assert_eq!(m.dim(), n);
        for v in 0..n {
            for u in 0..n {
                let want = if u == v { 0 } else { adj[v].intersection(&adj[u]).count() as u32 };
                prop_assert_eq!(m.get(v, u), want, "({}, {})", v, u);
            }
        }
    }

    #[test]
    fn triangle_counts_match_triples((n, edges) in edges_strategy(200, 1500)) {
        let g = CsrGraph::from_edges(&edges, n).unwrap();
        let adj = common::adjacency(&edges, n);
        let (total, per_node) = common::triangles_by_triples(&adj);
        prop_assert_eq!(closed_triads(&g), total);
        prop_assert_eq!(local_triangles(&g), per_node);
        let cc = clustering_coefficient(&g);
        prop_assert!((cc - common::clustering_by_pairs(&adj)).abs() <= 1e-12);
        prop_assert!((0.0..=1.0).contains(&cc));
    }

    #[test]
    fn region_sums_match_direct_windows((n, edges) in edges_strategy(12, 40), w in 1usize..4) {
        prop_assume!(w <= n);
        let g = CsrGraph::from_edges(&edges, n).unwrap();
        let m = shared_neighbors(&g, 10_000).unwrap();
        let regions = region_density(&m, w).unwrap();
        prop_assert_eq!(regions.len(), (n - w + 1) * (n - w + 1));
        for r in &regions {
            let mut s = 0u64;
            for i in r.row..r.row + w {
                for j in r.col..r.col + w {
                    s += m.get(i, j) as u64;
                }
            }
            prop_assert_eq!(r.sum, s);
        }
        prop_assert!(regions.windows(2).all(|p| p[0].sum >= p[1].sum));
    }

    #[test]
    fn samples_are_reproducible_and_exact((n, edges) in edges_strategy(60, 200), frac in 0.0f64..=1.0, seed in any::<u64>()) {
        let g = CsrGraph::from_edges(&edges, n).unwrap();
        let budget = (frac * n as f64) as usize;
        let a = sample_nodes(&g, budget, seed).unwrap();
        prop_assert_eq!(&a, &sample_nodes(&g, budget, seed).unwrap());
        prop_assert_eq!(a.len(), budget);
        let distinct: BTreeSet<_> = a.iter().collect();
        prop_assert_eq!(distinct.len(), budget);
        prop_assert!(a.windows(2).all(|p| p[0] < p[1]));

        let (sub, map) = sample_subgraph(&g, budget, seed).unwrap();
        sub.validate().unwrap();
        prop_assert_eq!(map.inverse(), a.as_slice());
        for (u, v) in sub.edges() {
            prop_assert!(g.has_edge(map.old_id(u), map.old_id(v)));
        }
    }
}

#[test]
fn cycles_have_triads_only_at_length_three() {
    assert_eq!(closed_triads(&cycle(3)), 1);
    for n in 4..30 {
        assert_eq!(closed_triads(&cycle(n)), 0, "cycle of {n}");
        assert_eq!(clustering_coefficient(&cycle(n)), 0.0);
    }
}

#[test]
fn trees_and_cliques() {
    // random recursive tree
    let mut edges = Vec::new();
    for v in 1..100u32 {
        edges.push((v, (v * 7919) % v));
    }
    let tree = CsrGraph::from_edges(&edges, 100).unwrap();
    assert_eq!(closed_triads(&tree), 0);
    assert_eq!(clustering_coefficient(&tree), 0.0);

    for n in 3..9usize {
        let mut e = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                e.push((u as NodeId, v as NodeId));
            }
        }
        let g = CsrGraph::from_edges(&e, n).unwrap();
        let s = subgraph_stats(&g);
        assert_eq!(s.closed_triads as usize, n * (n - 1) * (n - 2) / 6);
        assert_eq!(s.clustering_coefficient, 1.0);
    }
}

#[test]
fn k6_budget_three_is_always_a_triangle() {
    let mut e = Vec::new();
    for u in 0..6u32 {
        for v in u + 1..6 {
            e.push((u, v));
        }
    }
    let g = CsrGraph::from_edges(&e, 6).unwrap();
    let stats = batch_stats(&g, 3, 50, 11).unwrap();
    assert_eq!(stats.mean_clustering_coefficient, 1.0);
    assert_eq!(stats.mean_closed_triads, 1.0);
}

#[test]
fn batch_of_one_is_the_single_sample() {
    let g = dropreef_core::synth::random_graph(80, 400, 5);
    let (sub, _) = batch_sample(&g, 30, 9, 0).unwrap();
    let single = subgraph_stats(&sub);
    let batch = batch_stats(&g, 30, 1, 9).unwrap();
    assert_eq!(
        batch.mean_clustering_coefficient,
        single.clustering_coefficient
    );
    assert_eq!(batch.mean_closed_triads, single.closed_triads as f64);

    let full = batch_stats(&g, 80, 4, 9).unwrap();
    assert_eq!(full.mean_closed_triads, closed_triads(&g) as f64);
    assert_eq!(full.mean_clustering_coefficient, clustering_coefficient(&g));
}

#[test]
fn batch_stats_ignore_thread_count() {
    let g = dropreef_core::synth::random_graph(300, 3000, 2);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| batch_stats(&g, 100, 64, 77).unwrap())
    };
    let a = run(1);
    let b = run(4);
    assert_eq!(
        a.mean_clustering_coefficient.to_bits(),
        b.mean_clustering_coefficient.to_bits()
    );
    assert_eq!(
        a.mean_closed_triads.to_bits(),
        b.mean_closed_triads.to_bits()
    );
}

#[test]
fn cap_is_enforced() {
    let g = CsrGraph::empty(11);
    let err = shared_neighbors(&g, 10).unwrap_err();
    assert!(err.to_string().contains("cap"), "{err}");
}
