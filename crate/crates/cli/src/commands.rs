use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use anyhow::{Context, Result};
use dropreef_core::io::{
    read_csr, read_edge_list, read_labels, read_node_map, read_node_metrics, read_split,
    write_id_list, write_node_map,
};
use dropreef_core::probs::read_probs;
use dropreef_core::sampling::{batch_sample, subgraph_stats};
use dropreef_core::{
    batch_stats, degree_quantiles, drop_with_metrics, heuristic_probs, overlap_report,
    region_density, shared_neighbors, threshold_from_quantile, uniform_probs, wnh_all, CsrGraph,
    DropConfig, EdgeProbabilities, Heuristic, LabelMode, NodeId, NodeMetrics, SplitMask,
};
use serde_json::{json, Value};

use crate::bundle::{check_count, write_bundle, Bundle};
use crate::output::OutputDir;
use crate::{
    Analysis, Cli, Command, DropArgs, Format, GraphFormat, HeuristicArg, IngestArgs, NodeScope,
    ProbArgs, ProbsCmdArgs, SampleArgs, WnhArgs,
};

pub fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build_global()
            .context("configuring the worker pool")?;
    }
    let fmt = cli.format;
    let seed = cli.seed;
    match cli.command {
        Command::Ingest(a) => ingest(a),
        Command::Wnh(a) => wnh(a, fmt),
        Command::Probs(a) => probs(a),
        Command::Drop(a) => drop(a),
        Command::Sample(a) => sample(a, seed),
        Command::Analyze { which } => analyze(which, fmt, seed),
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(BufReader::new(f))
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

fn ingest(a: IngestArgs) -> Result<()> {
    let mut out = OutputDir::create(&a.out)?;
    let mode = if a.multi_label {
        LabelMode::MultiClass
    } else {
        LabelMode::SingleClass
    };
    let labels = read_labels(open(&a.labels)?, &path_str(&a.labels), a.num_classes, mode)?;
    let n = a.num_nodes.unwrap_or(labels.num_nodes());
    check_count(&a.labels, "label lines", n, labels.num_nodes())?;
    let split = match &a.split {
        Some(p) => {
            let s = read_split(open(p)?, &path_str(p))?;
            check_count(p, "split lines", n, s.len())?;
            s
        }
        None => SplitMask::all_train(n),
    };
    let graph = match a.graph_format {
        GraphFormat::Edges => {
            let edges = read_edge_list(open(&a.edges)?, &path_str(&a.edges), Some(n))?;
            CsrGraph::from_edges(&edges, n)?
        }
        GraphFormat::Csr => {
            let g = read_csr(open(&a.edges)?)
                .with_context(|| format!("reading {}", a.edges.display()))?;
            check_count(&a.edges, "graph nodes", n, g.num_nodes())?;
            g
        }
    };
    let probs = match &a.probs {
        Some(p) => Some(read_probs(open(p)?, &path_str(p), &graph)?),
        None => None,
    };
    out.stage("parse");
    write_bundle(
        &mut out,
        &graph,
        &labels,
        &split,
        probs.as_ref(),
        a.emit_edges,
    )?;
    out.finish(
        "ingest",
        json!({
            "edges": path_str(&a.edges),
            "labels": path_str(&a.labels),
            "split": a.split.as_deref().map(path_str),
            "probs": a.probs.as_deref().map(path_str),
        }),
        json!({
            "graph_format": format!("{:?}", a.graph_format).to_lowercase(),
            "num_nodes": n,
            "num_classes": labels.num_classes(),
            "label_mode": mode,
            "emit_edges": a.emit_edges,
        }),
    )
}

/// Resolve the probability source: an explicit file, then a heuristic, then
/// the bundle's stored probabilities, then uniform. The second value is
/// `None` when the result is the uniform default.
fn resolve_probs(
    args: &ProbArgs,
    bundle: &Bundle,
) -> Result<(EdgeProbabilities, Option<EdgeProbabilities>, Value)> {
    let g = &bundle.graph;
    if let Some(p) = &args.probs {
        let probs = read_probs(open(p)?, &path_str(p), g)?;
        return Ok((probs.clone(), Some(probs), json!({ "file": path_str(p) })));
    }
    if let Some(h) = args.heuristic {
        let (method, name) = match h {
            HeuristicArg::Jaccard => (Heuristic::Jaccard, "jaccard"),
            HeuristicArg::CommonNeighbors => (Heuristic::CommonNeighbors, "common-neighbors"),
        };
        let probs = heuristic_probs(g, method);
        return Ok((probs.clone(), Some(probs), json!({ "heuristic": name })));
    }
    if !args.uniform {
        if let Some(p) = &bundle.probs {
            return Ok((
                p.clone(),
                Some(p.clone()),
                json!({ "bundle": crate::bundle::PROBS }),
            ));
        }
    }
    Ok((uniform_probs(g), None, json!("uniform")))
}

fn scope_nodes(bundle: &Bundle, scope: NodeScope) -> Vec<NodeId> {
    match scope {
        NodeScope::Train => bundle.split.training_nodes(),
        NodeScope::All => (0..bundle.graph.num_nodes()).map(|v| v as NodeId).collect(),
    }
}

fn scope_name(scope: NodeScope) -> &'static str {
    match scope {
        NodeScope::Train => "train",
        NodeScope::All => "all",
    }
}

fn write_metrics(out: &mut OutputDir, metrics: &NodeMetrics, fmt: Format) -> Result<()> {
    match fmt {
        Format::Tsv => out.write("wnh.tsv", |w| Ok(metrics.write_tsv(w)?)),
        Format::Json => {
            let rows: Vec<Value> = metrics
                .iter()
                .map(|(v, d, x)| json!({ "node": v, "degree": d, "wnh": x }))
                .collect();
            out.write_json("wnh.json", &rows)
        }
    }
}

fn wnh(a: WnhArgs, fmt: Format) -> Result<()> {
    let mut out = OutputDir::create(&a.out)?;
    let bundle = Bundle::load(&a.bundle)?;
    let (probs, _, source) = resolve_probs(&a.probs, &bundle)?;
    out.stage("load");
    let metrics = wnh_all(
        &bundle.graph,
        &bundle.labels,
        &probs,
        &scope_nodes(&bundle, a.nodes),
    )?;
    out.stage("compute");
    write_metrics(&mut out, &metrics, fmt)?;
    out.finish(
        "wnh",
        json!({ "bundle": path_str(&a.bundle) }),
        json!({ "probs": source, "nodes": scope_name(a.nodes), "format": format_name(fmt) }),
    )
}

fn format_name(fmt: Format) -> &'static str {
    match fmt {
        Format::Tsv => "tsv",
        Format::Json => "json",
    }
}

fn probs(a: ProbsCmdArgs) -> Result<()> {
    let mut out = OutputDir::create(&a.out)?;
    let bundle = Bundle::load(&a.bundle)?;
    let (probs, _, source) = resolve_probs(&a.probs, &bundle)?;
    out.stage("compute");
    out.write(crate::bundle::PROBS, |w| {
        Ok(probs.write_records(&bundle.graph, w)?)
    })?;
    out.finish(
        "probs",
        json!({ "bundle": path_str(&a.bundle) }),
        json!({ "probs": source }),
    )
}

fn load_snapshot(path: &Path, node_map: Option<&Path>) -> Result<NodeMetrics> {
    let metrics = read_node_metrics(open(path)?, &path_str(path))?;
    let Some(map_path) = node_map else {
        return Ok(metrics);
    };
    let pairs = read_node_map(open(map_path)?, &path_str(map_path))?;
    let lookup: std::collections::HashMap<NodeId, NodeId> = pairs.into_iter().collect();
    let mut rows: Vec<(NodeId, usize, f64)> = metrics
        .iter()
        .filter_map(|(v, d, w)| lookup.get(&v).map(|&new| (new, d, w)))
        .collect();
    rows.sort_by_key(|r| r.0);
    let (nodes, rest): (Vec<_>, Vec<_>) = rows.into_iter().map(|(v, d, w)| (v, (d, w))).unzip();
    let (degree, wnh): (Vec<_>, Vec<_>) = rest.into_iter().unzip();
    NodeMetrics::from_parts(nodes, degree, wnh).with_context(|| {
        format!(
            "remapping {} through {}",
            path.display(),
            map_path.display()
        )
    })
}

fn drop(a: DropArgs) -> Result<()> {
    let mut out = OutputDir::create(&a.out)?;
    let bundle = Bundle::load(&a.bundle)?;
    let g = &bundle.graph;
    let (metrics, carried, source) = match &a.wnh_snapshot {
        Some(p) => {
            let m = load_snapshot(p, a.node_map.as_deref())?;
            let carried = bundle.probs.clone();
            (m, carried, json!({ "snapshot": path_str(p) }))
        }
        None => {
            let (probs, carried, source) = resolve_probs(&a.probs, &bundle)?;
            out.stage("load");
            let m = wnh_all(g, &bundle.labels, &probs, &bundle.split.training_nodes())?;
            (m, carried, source)
        }
    };
    out.stage("metrics");

    let train = bundle.split.training_nodes();
    let th_wnh = match (a.th_wnh, a.wnh_quantile) {
        (Some(t), _) => t,
        (None, Some(q)) => {
            let values: Vec<f64> = train
                .iter()
                .map(|&v| {
                    metrics
                        .wnh_of(v)
                        .with_context(|| format!("no WNH for training node {v}"))
                })
                .collect::<Result<_>>()?;
            threshold_from_quantile(&values, q).context("--wnh-quantile")?
        }
        (None, None) => unreachable!("clap requires a WNH threshold"),
    };
    let th_deg = match (a.th_deg, a.deg_quantile) {
        (Some(t), _) => t as usize,
        (None, Some(q)) => {
            let values: Vec<f64> = train.iter().map(|&v| g.deg(v as usize) as f64).collect();
            (threshold_from_quantile(&values, q).context("--deg-quantile")? as usize).max(1)
        }
        (None, None) => unreachable!("clap requires a degree threshold"),
    };
    let config = DropConfig {
        th_wnh,
        th_deg,
        retain_inference_edges: a.retain_inference_edges,
    };
    let mut outcome = drop_with_metrics(g, &metrics, &bundle.split, &config)?;
    outcome.report.dropped_ids = Some("dropped.txt".into());
    outcome.report.wnh_snapshot = Some("wnh.tsv".into());
    out.stage("drop");

    let labels = bundle.labels.remap(&outcome.id_map);
    let probs = carried.map(|p| p.remap(g, &outcome.graph, &outcome.id_map));
    write_bundle(
        &mut out,
        &outcome.graph,
        &labels,
        &outcome.split,
        probs.as_ref(),
        a.emit_edges,
    )?;
    out.write("node_map.tsv", |w| Ok(write_node_map(&outcome.id_map, w)?))?;
    out.write("dropped.txt", |w| {
        Ok(write_id_list(&outcome.report.dropped, w)?)
    })?;
    out.write("wnh.tsv", |w| Ok(metrics.write_tsv(w)?))?;
    out.write_json("drop_report.json", &outcome.report)?;
    out.finish(
        "drop",
        json!({
            "bundle": path_str(&a.bundle),
            "wnh_snapshot": a.wnh_snapshot.as_deref().map(path_str),
            "node_map": a.node_map.as_deref().map(path_str),
        }),
        json!({
            "probs": source,
            "th_wnh": th_wnh,
            "th_deg": th_deg,
            "wnh_quantile": a.wnh_quantile,
            "deg_quantile": a.deg_quantile,
            "retain_inference_edges": a.retain_inference_edges,
            "emit_edges": a.emit_edges,
        }),
    )
}

fn sample(a: SampleArgs, seed: u64) -> Result<()> {
    let mut out = OutputDir::create(&a.out)?;
    let bundle = Bundle::load(&a.bundle)?;
    out.stage("load");
    let (sub, map) = batch_sample(&bundle.graph, a.budget, seed, a.index)?;
    let stats = subgraph_stats(&sub);
    out.stage("sample");
    let labels = bundle.labels.remap(&map);
    let split = bundle.split.remap(&map);
    let probs = bundle
        .probs
        .as_ref()
        .map(|p| p.remap(&bundle.graph, &sub, &map));
    write_bundle(
        &mut out,
        &sub,
        &labels,
        &split,
        probs.as_ref(),
        a.emit_edges,
    )?;
    out.write("node_map.tsv", |w| Ok(write_node_map(&map, w)?))?;
    out.write_json("stats.json", &stats)?;
    out.finish(
        "sample",
        json!({ "bundle": path_str(&a.bundle) }),
        json!({ "budget": a.budget, "index": a.index, "seed": seed }),
    )
}

fn analyze(which: Analysis, fmt: Format, seed: u64) -> Result<()> {
    match which {
        Analysis::Quantiles {
            bundle,
            top_fraction,
            buckets,
            out,
        } => {
            let mut dir = OutputDir::create(&out)?;
            let b = Bundle::load(&bundle)?;
            dir.stage("load");
            let report = degree_quantiles(&b.graph, top_fraction, buckets)?;
            dir.stage("compute");
            match fmt {
                Format::Tsv => dir.write_bytes("quantiles.tsv", report.to_tsv().as_bytes())?,
                Format::Json => dir.write_json("quantiles.json", &report)?,
            }
            dir.finish(
                "analyze quantiles",
                json!({ "bundle": path_str(&bundle) }),
                json!({ "top_fraction": top_fraction, "buckets": buckets, "format": format_name(fmt) }),
            )
        }
        Analysis::Overlap {
            bundle,
            wnh_top,
            deg_top,
            buckets,
            nodes,
            probs,
            out,
        } => {
            let mut dir = OutputDir::create(&out)?;
            let b = Bundle::load(&bundle)?;
            let (p, _, source) = resolve_probs(&probs, &b)?;
            dir.stage("load");
            let metrics = wnh_all(&b.graph, &b.labels, &p, &scope_nodes(&b, nodes))?;
            let report = overlap_report(&metrics, &b.graph, wnh_top, deg_top, buckets)?;
            dir.stage("compute");
            match fmt {
                Format::Tsv => dir.write_bytes("overlap.tsv", report.to_tsv().as_bytes())?,
                Format::Json => dir.write_json("overlap.json", &report)?,
            }
            dir.finish(
                "analyze overlap",
                json!({ "bundle": path_str(&bundle) }),
                json!({
                    "wnh_top": wnh_top,
                    "deg_top": deg_top,
                    "buckets": buckets,
                    "nodes": scope_name(nodes),
                    "probs": source,
                    "format": format_name(fmt),
                }),
            )
        }
        Analysis::SubgraphStats {
            bundle,
            budget,
            num_samples,
            out,
        } => {
            let mut dir = OutputDir::create(&out)?;
            let b = Bundle::load(&bundle)?;
            dir.stage("load");
            let stats = batch_stats(&b.graph, budget, num_samples, seed)?;
            dir.stage("compute");
            match fmt {
                Format::Tsv => dir.write("subgraph_stats.tsv", |w| {
                    writeln!(
                        w,
                        "num_samples\tbudget\tseed\tmean_clustering_coefficient\tmean_closed_triads"
                    )?;
                    writeln!(
                        w,
                        "{}\t{}\t{}\t{}\t{}",
                        stats.num_samples,
                        stats.budget,
                        stats.seed,
                        stats.mean_clustering_coefficient,
                        stats.mean_closed_triads
                    )?;
                    Ok(())
                })?,
                Format::Json => dir.write_json("subgraph_stats.json", &stats)?,
            }
            dir.finish(
                "analyze subgraph-stats",
                json!({ "bundle": path_str(&bundle) }),
                json!({ "budget": budget, "num_samples": num_samples, "seed": seed, "format": format_name(fmt) }),
            )
        }
        Analysis::SharedNeighbors {
            bundle,
            budget,
            cap,
            window,
            top,
            out,
        } => {
            let mut dir = OutputDir::create(&out)?;
            let b = Bundle::load(&bundle)?;
            dir.stage("load");
            let budget = budget.unwrap_or(b.graph.num_nodes());
            let (sub, map) = batch_sample(&b.graph, budget, seed, 0)?;
            let matrix = shared_neighbors(&sub, cap).context("use --budget or --cap")?;
            let mut regions = region_density(&matrix, window)?;
            regions.truncate(top);
            dir.stage("compute");
            dir.write("sampled.txt", |w| Ok(write_id_list(map.inverse(), w)?))?;
            match fmt {
                Format::Tsv => {
                    dir.write_bytes("shared_neighbors.tsv", matrix.to_dense_tsv().as_bytes())?;
                    dir.write("shared_neighbors_sparse.tsv", |w| {
                        for (v, u, c) in matrix.sparse_triples() {
                            writeln!(w, "{v}\t{u}\t{c}")?;
                        }
                        Ok(())
                    })?;
                    dir.write("regions.tsv", |w| {
                        writeln!(w, "row\tcol\tsum")?;
                        for r in &regions {
                            writeln!(w, "{}\t{}\t{}", r.row, r.col, r.sum)?;
                        }
                        Ok(())
                    })?;
                }
                Format::Json => {
                    let triples: Vec<[u64; 3]> = matrix
                        .sparse_triples()
                        .into_iter()
                        .map(|(v, u, c)| [v as u64, u as u64, c as u64])
                        .collect();
                    dir.write_json(
                        "shared_neighbors.json",
                        &json!({ "dim": matrix.dim(), "triples": triples, "regions": regions }),
                    )?;
                }
            }
            dir.finish(
                "analyze shared-neighbors",
                json!({ "bundle": path_str(&bundle) }),
                json!({
                    "budget": budget,
                    "cap": cap,
                    "window": window,
                    "top": top,
                    "seed": seed,
                    "format": format_name(fmt),
                }),
            )
        }
    }
}
