//! Text and binary file formats.
//!
//! * Edge list: one `u v` pair of decimal ids per line; blank lines and lines
//!   starting with `#` are ignored.
//! * Binary CSR (`GRF1`): the 4 magic bytes `GRF1`, then little-endian `u64`
//!   `num_nodes` and `num_targets`, then `num_nodes + 1` little-endian `u64`
//!   offsets, then `num_targets` little-endian `u64` neighbor ids.
//! * Labels: one line per node holding the whitespace-separated class indices
//!   set on that node; an empty line is an all-zero row.
//! * Split: one line per node, a single token `train`, `val`, `test` (or
//!   `drop` for nodes removed from training but kept for inference).
//! * Node id map: `old_id<TAB>new_id` per retained node, ascending.
//! * WNH snapshot: `node_id<TAB>degree<TAB>wnh`, ascending by node id.

use std::io::{BufRead, Read, Write};

use crate::error::{Error, Result};
use crate::graph::{CsrGraph, NodeId, NodeIdMap};
use crate::labels::{LabelMatrix, LabelMode, Role, SplitMask};
use crate::metrics::NodeMetrics;

pub const CSR_MAGIC: &[u8; 4] = b"GRF1";

/// Parse an edge list. When `num_nodes` is given, ids at or above it are
/// rejected with the offending line number.
pub fn read_edge_list<R: BufRead>(
    reader: R,
    source_name: &str,
    num_nodes: Option<usize>,
) -> Result<Vec<(NodeId, NodeId)>> {
    let mut edges = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::parse(source_name, lineno, "expected two node ids"));
        };
        let parse = |tok: &str| -> Result<NodeId> {
            let id: NodeId = tok
                .parse()
                .map_err(|_| Error::parse(source_name, lineno, format!("bad node id {tok:?}")))?;
            if let Some(n) = num_nodes {
                if id as usize >= n {
                    return Err(Error::parse(
                        source_name,
                        lineno,
                        format!("node id {id} out of range (graph has {n} nodes)"),
                    ));
                }
            }
            Ok(id)
        };
        let u = parse(a)?;
        let v = parse(b)?;
        edges.push((u, v));
    }
    Ok(edges)
}

/// Canonical edge list: each undirected edge once as `u v` with `u < v`,
/// ascending.
pub fn write_edge_list<W: Write>(graph: &CsrGraph, mut out: W) -> Result<()> {
    for (u, v) in graph.edges() {
        writeln!(out, "{u} {v}")?;
    }
    Ok(())
}

pub fn write_csr<W: Write>(graph: &CsrGraph, mut out: W) -> Result<()> {
    out.write_all(CSR_MAGIC)?;
    out.write_all(&(graph.num_nodes() as u64).to_le_bytes())?;
    out.write_all(&(graph.targets().len() as u64).to_le_bytes())?;
    for &o in graph.offsets() {
        out.write_all(&(o as u64).to_le_bytes())?;
    }
    for &t in graph.targets() {
        out.write_all(&(t as u64).to_le_bytes())?;
    }
    Ok(())
}

fn read_u64<R: Read>(input: &mut R) -> Result<u64> {
    let mut buf = [0u8; 8];
    input.read_exact(&mut buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::Format("truncated file".into()),
        _ => Error::Io(e),
    })?;
    Ok(u64::from_le_bytes(buf))
}

/// Read a `GRF1` file and validate every graph invariant.
pub fn read_csr<R: Read>(mut input: R) -> Result<CsrGraph> {
    let mut magic = [0u8; 4];
    input
        .read_exact(&mut magic)
        .map_err(|_| Error::Format("missing magic bytes".into()))?;
    if &magic != CSR_MAGIC {
        return Err(Error::Format(format!("bad magic {magic:?}, expected GRF1")));
    }
    let num_nodes = read_u64(&mut input)? as usize;
    let num_targets = read_u64(&mut input)? as usize;
    let mut offsets = Vec::with_capacity(num_nodes.saturating_add(1).min(1 << 24));
    for _ in 0..=num_nodes {
        offsets.push(read_u64(&mut input)? as usize);
    }
    let mut targets = Vec::with_capacity(num_targets.min(1 << 26));
    for _ in 0..num_targets {
        let t = read_u64(&mut input)?;
        let id = NodeId::try_from(t)
            .map_err(|_| Error::Format(format!("neighbor id {t} does not fit the id width")))?;
        targets.push(id);
    }
    let mut rest = [0u8; 1];
    if input.read(&mut rest)? != 0 {
        return Err(Error::Format("trailing bytes after targets".into()));
    }
    CsrGraph::from_parts(offsets, targets)
}

/// Parse a label file. `num_classes` defaults to the largest index plus one.
pub fn read_labels<R: BufRead>(
    reader: R,
    source_name: &str,
    num_classes: Option<usize>,
    mode: LabelMode,
) -> Result<LabelMatrix> {
    let mut rows = Vec::new();
    let mut max_class: Option<u32> = None;
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let mut row = Vec::new();
        for tok in line.split_whitespace() {
            let c: u32 = tok.parse().map_err(|_| {
                Error::parse(source_name, lineno, format!("bad class index {tok:?}"))
            })?;
            if let Some(n) = num_classes {
                if c as usize >= n {
                    return Err(Error::parse(
                        source_name,
                        lineno,
                        format!("class {c} out of range (num_classes = {n})"),
                    ));
                }
            }
            max_class = max_class.max(Some(c));
            row.push(c);
        }
        if mode == LabelMode::SingleClass && row.len() != 1 {
            return Err(Error::parse(
                source_name,
                lineno,
                format!(
                    "single-class labels need exactly one class, found {}",
                    row.len()
                ),
            ));
        }
        rows.push(row);
    }
    let num_classes = num_classes.unwrap_or_else(|| max_class.map_or(0, |c| c as usize + 1));
    LabelMatrix::from_rows(rows, num_classes, mode)
}

pub fn write_labels<W: Write>(labels: &LabelMatrix, mut out: W) -> Result<()> {
    for v in 0..labels.num_nodes() {
        let row = labels.row(v);
        for (i, c) in row.iter().enumerate() {
            if i > 0 {
                out.write_all(b" ")?;
            }
            write!(out, "{c}")?;
        }
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_split<R: BufRead>(reader: R, source_name: &str) -> Result<SplitMask> {
    let mut roles = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let role: Role = line
            .trim()
            .parse()
            .map_err(|e: Error| Error::parse(source_name, lineno, e.to_string()))?;
        roles.push(role);
    }
    Ok(SplitMask::new(roles))
}

pub fn write_split<W: Write>(mask: &SplitMask, mut out: W) -> Result<()> {
    for r in mask.roles() {
        writeln!(out, "{r}")?;
    }
    Ok(())
}

pub fn write_node_map<W: Write>(map: &NodeIdMap, mut out: W) -> Result<()> {
    for (new, &old) in map.inverse().iter().enumerate() {
        writeln!(out, "{old}\t{new}")?;
    }
    Ok(())
}

/// Parse a node id map file into `(old, new)` pairs.
pub fn read_node_map<R: BufRead>(reader: R, source_name: &str) -> Result<Vec<(NodeId, NodeId)>> {
    let mut pairs = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split('\t');
        let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::parse(
                source_name,
                lineno,
                "expected old_id<TAB>new_id",
            ));
        };
        let old = a
            .trim()
            .parse()
            .map_err(|_| Error::parse(source_name, lineno, format!("bad id {a:?}")))?;
        let new = b
            .trim()
            .parse()
            .map_err(|_| Error::parse(source_name, lineno, format!("bad id {b:?}")))?;
        pairs.push((old, new));
    }
    Ok(pairs)
}

/// Parse a WNH snapshot written by [`NodeMetrics::write_tsv`].
pub fn read_node_metrics<R: BufRead>(reader: R, source_name: &str) -> Result<NodeMetrics> {
    let (mut nodes, mut degree, mut wnh) = (Vec::new(), Vec::new(), Vec::new());
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 3 {
            return Err(Error::parse(
                source_name,
                lineno,
                "expected node_id<TAB>degree<TAB>wnh",
            ));
        }
        let bad = |what: &str, tok: &str| {
            Error::parse(source_name, lineno, format!("bad {what} {tok:?}"))
        };
        nodes.push(f[0].parse::<NodeId>().map_err(|_| bad("node id", f[0]))?);
        degree.push(f[1].parse::<usize>().map_err(|_| bad("degree", f[1]))?);
        let w: f64 = f[2].parse().map_err(|_| bad("wnh", f[2]))?;
        if !w.is_finite() || w < 0.0 {
            return Err(bad("wnh", f[2]));
        }
        wnh.push(w);
    }
    NodeMetrics::from_parts(nodes, degree, wnh)
        .map_err(|e| Error::InvalidInput(format!("{source_name}: {e}")))
}

/// One id per line.
pub fn write_id_list<W: Write>(ids: &[NodeId], mut out: W) -> Result<()> {
    for id in ids {
        writeln!(out, "{id}")?;
    }
    Ok(())
}
