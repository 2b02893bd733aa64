//! Plain-text edge lists: `src<TAB>dst[<TAB>weight]`, `#` comments.
//!
//! Fields may be separated by any run of tabs or spaces, so identifiers
//! cannot contain whitespace.

use std::io::{BufRead, Write};

use super::adjacency::SparseAdjacency;
use super::registry::{NodeId, NodeRegistry};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Parses an edge list into undirected triplets, registering unseen
/// identifiers in first-appearance order.
///
/// With `weighted == false` any third column is ignored and every edge has
/// weight 1.
pub fn parse_edge_list<T: Scalar, R: BufRead>(
    source: R,
    weighted: bool,
    registry: &mut NodeRegistry,
) -> Result<Vec<(NodeId, NodeId, T)>> {
    let mut edges = Vec::new();
    for (idx, line) in source.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(Error::parse(
                lineno,
                format!(
                    "expected `src dst [weight]`, found {} field(s)",
                    fields.len()
                ),
            ));
        }
        let weight = match (weighted, fields.get(2)) {
            (true, Some(raw)) => {
                let w: f64 = raw
                    .parse()
                    .map_err(|_| Error::parse(lineno, format!("weight {raw:?} is not a number")))?;
                if !(w > 0.0) || !w.is_finite() {
                    return Err(Error::validation(format!(
                        "line {lineno}: weight {raw} must be positive and finite"
                    )));
                }
                T::of(w)
            }
            _ => T::one(),
        };
        let u = registry.intern(fields[0]);
        let v = registry.intern(fields[1]);
        edges.push((u, v, weight));
    }
    Ok(edges)
}

/// Reads an edge list and returns its symmetrized adjacency over the whole
/// registry (after registering the list's identifiers).
pub fn load_edge_list<T: Scalar, R: BufRead>(
    source: R,
    weighted: bool,
    registry: &mut NodeRegistry,
) -> Result<SparseAdjacency<T>> {
    let edges = parse_edge_list(source, weighted, registry)?;
    SparseAdjacency::from_undirected_edges(registry.len(), edges)
}

/// Writes each undirected edge once (`i <= j`, row-major) with a
/// 17-significant-digit weight. Reading the output back into the same
/// registry reproduces `adj` exactly.
pub fn write_edge_list<T: Scalar, W: Write>(
    adj: &SparseAdjacency<T>,
    registry: &NodeRegistry,
    mut out: W,
) -> Result<()> {
    if registry.len() < adj.n() {
        return Err(Error::Dimension(format!(
            "registry has {} nodes, adjacency {}",
            registry.len(),
            adj.n()
        )));
    }
    for (i, j, w) in adj.entries().filter(|&(i, j, _)| i <= j) {
        writeln!(
            out,
            "{}\t{}\t{}",
            registry.name(i),
            registry.name(j),
            format_float(w)
        )?;
    }
    Ok(())
}

/// 17 significant digits: enough to round-trip any `f64`.
pub fn format_float<T: Scalar>(v: T) -> String {
    format!("{:.16e}", v.as_f64())
}
