//! The offline drop pipeline: score training nodes, flag the ones that are
//! both high-degree and high-WNH, and remove them with their edges.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{to_id, CsrGraph, NodeId, NodeIdMap};
use crate::labels::{LabelMatrix, Role, SplitMask};
use crate::metrics::{wnh_all, NodeMetrics};
use crate::probs::EdgeProbabilities;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DropConfig {
    pub th_wnh: f64,
    pub th_deg: usize,
    /// Keep dropped nodes and their edges to validation/test nodes so the
    /// output still serves as an inference graph. Dropped nodes lose their
    /// training role instead of disappearing.
    pub retain_inference_edges: bool,
}

impl DropConfig {
    pub fn new(th_wnh: f64, th_deg: usize) -> Self {
        Self {
            th_wnh,
            th_deg,
            retain_inference_edges: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.th_wnh.is_finite() || self.th_wnh < 0.0 {
            return Err(Error::InvalidInput(format!(
                "th_wnh must be finite and non-negative, got {}",
                self.th_wnh
            )));
        }
        if self.th_deg < 1 {
            return Err(Error::InvalidInput("th_deg must be at least 1".into()));
        }
        Ok(())
    }
}

/// Outcome statistics of one drop. Serializes to the drop report JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DropReport {
    /// Original ids of the dropped nodes, ascending. Written to its own file.
    #[serde(skip)]
    pub dropped: Vec<NodeId>,
    pub dropped_count: usize,
    pub train_count: usize,
    pub drop_node_ratio: f64,
    /// Undirected edges removed from the graph.
    pub removed_edges: usize,
    /// Undirected edges with at least one training endpoint.
    pub training_edges: usize,
    pub drop_edge_ratio: f64,
    pub th_wnh: Option<f64>,
    pub th_deg: Option<usize>,
    pub retain_inference_edges: bool,
    pub dropped_ids: Option<String>,
    pub wnh_snapshot: Option<String>,
}

#[derive(Debug, Clone)]
pub struct DropOutcome {
    pub graph: CsrGraph,
    pub id_map: NodeIdMap,
    /// Split of the output graph, indexed by new id.
    pub split: SplitMask,
    pub report: DropReport,
}

/// Training nodes with `degree >= th_deg` and `wnh >= th_wnh`, ascending.
pub fn detect_redundant(
    metrics: &NodeMetrics,
    graph: &CsrGraph,
    mask: &SplitMask,
    config: &DropConfig,
) -> Result<Vec<NodeId>> {
    if mask.len() != graph.num_nodes() {
        return Err(Error::CountMismatch {
            what: "split entries".into(),
            expected: graph.num_nodes(),
            actual: mask.len(),
        });
    }
    let mut redundant = Vec::new();
    for v in mask.training_nodes() {
        let score = metrics
            .wnh_of(v)
            .ok_or_else(|| Error::Inconsistent(format!("no WNH computed for training node {v}")))?;
        if graph.deg(v as usize) >= config.th_deg && score >= config.th_wnh {
            redundant.push(v);
        }
    }
    Ok(redundant)
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Remove `redundant` training nodes.
///
/// By default every incident edge goes away along with the nodes and the
/// survivors are renumbered. With `retain_inference_edges`, node ids are
/// kept, only edges touching the training side are cut, and the dropped
/// nodes take the [`Role::Dropped`] role.
pub fn drop_nodes(
    graph: &CsrGraph,
    redundant: &[NodeId],
    mask: &SplitMask,
    retain_inference_edges: bool,
) -> Result<DropOutcome> {
    let n = graph.num_nodes();
    if mask.len() != n {
        return Err(Error::CountMismatch {
            what: "split entries".into(),
            expected: n,
            actual: mask.len(),
        });
    }
    let mut is_dropped = vec![false; n];
    for &v in redundant {
        if v as usize >= n {
            return Err(Error::out_of_range(v as u64, n));
        }
        if !mask.is_train(v as usize) {
            return Err(Error::InvalidInput(format!(
                "node {v} is not a training node; only training nodes can be dropped"
            )));
        }
        is_dropped[v as usize] = true;
    }
    let dropped: Vec<NodeId> = (0..n).filter(|&v| is_dropped[v]).map(to_id).collect();

    let training_edges = graph
        .edges()
        .filter(|&(u, v)| mask.is_train(u as usize) || mask.is_train(v as usize))
        .count();

    let (out, id_map, split) = if retain_inference_edges {
        let out = graph.retain_edges(|a, b| {
            let (a, b) = (a as usize, b as usize);
            !((is_dropped[a] && mask.is_train(b)) || (is_dropped[b] && mask.is_train(a)))
        });
        let roles = (0..n)
            .map(|v| {
                if is_dropped[v] {
                    Role::Dropped
                } else {
                    mask.role(v)
                }
            })
            .collect();
        (out, NodeIdMap::identity(n), SplitMask::new(roles))
    } else {
        let keep: Vec<bool> = is_dropped.iter().map(|&d| !d).collect();
        let (out, map) = graph.restrict(&keep);
        let split = mask.remap(&map);
        (out, map, split)
    };

    let removed_edges = graph.num_edges() - out.num_edges();
    let train_count = mask.count(Role::Train);
    let report = DropReport {
        dropped_count: dropped.len(),
        train_count,
        drop_node_ratio: ratio(dropped.len(), train_count),
        removed_edges,
        training_edges,
        drop_edge_ratio: ratio(removed_edges, training_edges),
        dropped,
        th_wnh: None,
        th_deg: None,
        retain_inference_edges,
        dropped_ids: None,
        wnh_snapshot: None,
    };
    Ok(DropOutcome {
        graph: out,
        id_map,
        split,
        report,
    })
}

#[derive(Debug, Clone)]
pub struct DropRun {
    /// WNH of every training node, for persisting as a snapshot.
    pub metrics: NodeMetrics,
    pub outcome: DropOutcome,
}

/// Score all training nodes, detect redundancy and drop it.
pub fn run_dropreef(
    graph: &CsrGraph,
    labels: &LabelMatrix,
    probs: &EdgeProbabilities,
    mask: &SplitMask,
    config: &DropConfig,
) -> Result<DropRun> {
    config.validate()?;
    if mask.len() != graph.num_nodes() {
        return Err(Error::CountMismatch {
            what: "split entries".into(),
            expected: graph.num_nodes(),
            actual: mask.len(),
        });
    }
    let metrics = wnh_all(graph, labels, probs, &mask.training_nodes())?;
    let outcome = drop_with_metrics(graph, &metrics, mask, config)?;
    Ok(DropRun { metrics, outcome })
}

/// Detection and dropping against previously computed WNH, such as a saved
/// snapshot remapped onto `graph`. Degrees are read from `graph`.
///
/// Re-running on a drop's own output with its remapped snapshot flags
/// nothing: every node passing both thresholds was removed the first time.
/// Recomputing WNH instead can flag new nodes, because dropping a neighbor
/// changes the remaining neighborhood.
pub fn drop_with_metrics(
    graph: &CsrGraph,
    metrics: &NodeMetrics,
    mask: &SplitMask,
    config: &DropConfig,
) -> Result<DropOutcome> {
    config.validate()?;
    let redundant = detect_redundant(metrics, graph, mask, config)?;
    let mut outcome = drop_nodes(graph, &redundant, mask, config.retain_inference_edges)?;
    outcome.report.th_wnh = Some(config.th_wnh);
    outcome.report.th_deg = Some(config.th_deg);
    Ok(outcome)
}

/// Nearest-rank quantile: the element at rank `⌈q·(n−1)⌉` of the ascending
/// sort.
pub fn threshold_from_quantile(values: &[f64], q: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InvalidInput(
            "cannot take a quantile of no values".into(),
        ));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidInput(format!(
            "quantile must lie in [0, 1], got {q}"
        )));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let pos = q * (sorted.len() - 1) as f64;
    // same rounding guard as the fraction counts in `metrics`
    let rank = ((pos - 1e-9).ceil().max(0.0) as usize).min(sorted.len() - 1);
    Ok(sorted[rank])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probs::uniform_probs;

    fn star4() -> CsrGraph {
        CsrGraph::from_edges(&[(0, 1), (0, 2), (0, 3), (0, 4)], 5).unwrap()
    }

    #[test]
    fn quantile_thresholds() {
        let v = [5.0, 1.0, 4.0, 2.0, 3.0];
        assert_eq!(threshold_from_quantile(&v, 0.0).unwrap(), 1.0);
        assert_eq!(threshold_from_quantile(&v, 1.0).unwrap(), 5.0);
        assert_eq!(threshold_from_quantile(&v, 0.5).unwrap(), 3.0);
        assert_eq!(threshold_from_quantile(&v, 0.51).unwrap(), 4.0);
        assert!(threshold_from_quantile(&[], 0.5).is_err());
        assert!(threshold_from_quantile(&v, 1.5).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(DropConfig::new(0.5, 0).validate().is_err());
        assert!(DropConfig::new(f64::NAN, 2).validate().is_err());
        assert!(DropConfig::new(0.0, 1).validate().is_ok());
    }

    #[test]
    fn star_center_ratios() {
        let g = star4();
        let mask = SplitMask::all_train(5);
        let out = drop_nodes(&g, &[0], &mask, false).unwrap();
        assert_eq!(out.report.drop_node_ratio, 0.2);
        assert_eq!(out.report.drop_edge_ratio, 1.0);
        assert_eq!(out.graph.num_nodes(), 4);
        assert_eq!(out.graph.num_edges(), 0);
        assert_eq!(out.split.len(), 4);
    }

    #[test]
    fn empty_drop_is_a_no_op() {
        let g = star4();
        let mask = SplitMask::all_train(5);
        let out = drop_nodes(&g, &[], &mask, false).unwrap();
        assert_eq!(out.graph, g);
        assert_eq!(out.report.drop_node_ratio, 0.0);
        assert_eq!(out.report.drop_edge_ratio, 0.0);
    }

    #[test]
    fn refuses_non_training_nodes() {
        let g = star4();
        let mut roles = vec![Role::Train; 5];
        roles[0] = Role::Test;
        let err = drop_nodes(&g, &[0], &SplitMask::new(roles), false).unwrap_err();
        assert!(err.to_string().contains("not a training node"));
    }

    #[test]
    fn retain_mode_keeps_inference_edges() {
        // center 0 is train; leaves 1,2 train, 3 val, 4 test
        let g = star4();
        let roles = vec![Role::Train, Role::Train, Role::Train, Role::Val, Role::Test];
        let mask = SplitMask::new(roles);
        let out = drop_nodes(&g, &[0], &mask, true).unwrap();
        assert_eq!(out.graph.num_nodes(), 5);
        assert!(out.id_map.is_identity());
        assert!(out.graph.has_edge(0, 3) && out.graph.has_edge(0, 4));
        assert!(!out.graph.has_edge(0, 1));
        assert_eq!(out.split.role(0), Role::Dropped);
        assert_eq!(out.report.removed_edges, 2);
        assert_eq!(out.report.drop_edge_ratio, 0.5);
        out.graph.validate().unwrap();
    }

    #[test]
    fn vacuous_and_impossible_thresholds() {
        // path 0-1-2 plus isolated 3, alternating classes
        let g = CsrGraph::from_edges(&[(0, 1), (1, 2)], 4).unwrap();
        let labels = LabelMatrix::single_class(&[0, 1, 0, 1], 2).unwrap();
        let mask = SplitMask::all_train(4);
        let m = wnh_all(&g, &labels, &uniform_probs(&g), &mask.training_nodes()).unwrap();

        let all = detect_redundant(&m, &g, &mask, &DropConfig::new(0.0, 1)).unwrap();
        assert_eq!(all, vec![0, 1, 2]);

        let none = detect_redundant(&m, &g, &mask, &DropConfig::new(1.5, 1)).unwrap();
        assert!(none.is_empty());
    }

    #[test]
    fn missing_metrics_is_an_internal_error() {
        let g = star4();
        let labels = LabelMatrix::single_class(&[0; 5], 1).unwrap();
        let mask = SplitMask::all_train(5);
        let m = wnh_all(&g, &labels, &uniform_probs(&g), &[0, 1]).unwrap();
        let err = detect_redundant(&m, &g, &mask, &DropConfig::new(0.0, 1)).unwrap_err();
        assert!(matches!(err, Error::Inconsistent(_)));
    }

    #[test]
    fn heterophilic_hub_is_the_only_drop() {
        // hub 0 with 5 leaves of another class; leaves also form a path
        let mut edges: Vec<(NodeId, NodeId)> = (1..=5).map(|l| (0, l)).collect();
        edges.extend([(1, 2), (2, 3), (3, 4), (4, 5)]);
        let g = CsrGraph::from_edges(&edges, 6).unwrap();
        let labels = LabelMatrix::single_class(&[1, 0, 0, 0, 0, 0], 2).unwrap();
        let mask = SplitMask::all_train(6);
        let run = run_dropreef(
            &g,
            &labels,
            &uniform_probs(&g),
            &mask,
            &DropConfig::new(1.0, 4),
        )
        .unwrap();
        assert_eq!(run.outcome.report.dropped, vec![0]);
        assert_eq!(run.outcome.graph.num_edges(), 4);
        assert_eq!(run.outcome.report.th_deg, Some(4));
    }
}
