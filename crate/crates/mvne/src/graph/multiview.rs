//! A set of views (edge types) indexed against one shared node registry.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use super::adjacency::SparseAdjacency;
use super::edgelist::parse_edge_list;
use super::registry::{NodeId, NodeRegistry};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// One view: its name, adjacency over the global index space, and the nodes
/// with non-zero degree in it.
#[derive(Debug, Clone, PartialEq)]
pub struct View<T> {
    pub name: String,
    pub adjacency: SparseAdjacency<T>,
    active: Vec<NodeId>,
}

impl<T: Scalar> View<T> {
    pub fn new(name: impl Into<String>, adjacency: SparseAdjacency<T>) -> Self {
        let active = adjacency.active_nodes();
        Self {
            name: name.into(),
            adjacency,
            active,
        }
    }

    /// Nodes with degree > 0 in this view, ascending.
    pub fn active_nodes(&self) -> &[NodeId] {
        &self.active
    }

    pub fn active_count(&self) -> usize {
        self.active.len()
    }
}

/// Multi-view network with a single node type.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiViewGraph<T> {
    registry: NodeRegistry,
    views: Vec<View<T>>,
}

impl<T: Scalar> MultiViewGraph<T> {
    /// Assembles a graph from adjacencies already indexed against
    /// `registry`. Each adjacency is widened to the registry size.
    pub fn from_views<S: Into<String>>(
        registry: NodeRegistry,
        views: Vec<(S, SparseAdjacency<T>)>,
    ) -> Result<Self> {
        if views.is_empty() {
            return Err(Error::validation(
                "a multi-view graph needs at least one view",
            ));
        }
        let n = registry.len();
        let views = views
            .into_iter()
            .map(|(name, adj)| Ok(View::new(name, adj.with_node_count(n)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { registry, views })
    }

    /// Single-view graph.
    pub fn single(
        registry: NodeRegistry,
        name: impl Into<String>,
        adjacency: SparseAdjacency<T>,
    ) -> Result<Self> {
        Self::from_views(registry, vec![(name.into(), adjacency)])
    }

    pub fn registry(&self) -> &NodeRegistry {
        &self.registry
    }

    pub fn node_count(&self) -> usize {
        self.registry.len()
    }

    pub fn views(&self) -> &[View<T>] {
        &self.views
    }

    pub fn view_count(&self) -> usize {
        self.views.len()
    }

    pub fn active_counts(&self) -> Vec<usize> {
        self.views.iter().map(View::active_count).collect()
    }
}

/// Parses every `(name, edge list)` source against one registry (the union
/// of all identifiers, in first-appearance order across the manifest).
pub fn build_multiview<T, R, S>(manifest: Vec<(S, R)>, weighted: bool) -> Result<MultiViewGraph<T>>
where
    T: Scalar,
    R: BufRead,
    S: Into<String>,
{
    build_multiview_with(NodeRegistry::new(), manifest, weighted)
}

/// Like [`build_multiview`] but starting from a pre-populated registry.
pub fn build_multiview_with<T, R, S>(
    mut registry: NodeRegistry,
    manifest: Vec<(S, R)>,
    weighted: bool,
) -> Result<MultiViewGraph<T>>
where
    T: Scalar,
    R: BufRead,
    S: Into<String>,
{
    if manifest.is_empty() {
        return Err(Error::validation("manifest lists no views"));
    }
    let mut parsed = Vec::with_capacity(manifest.len());
    for (name, source) in manifest {
        let name = name.into();
        let edges = parse_edge_list::<T, _>(source, weighted, &mut registry)
            .map_err(|e| annotate(&name, e))?;
        parsed.push((name, edges));
    }
    let n = registry.len();
    let views = parsed
        .into_iter()
        .map(|(name, edges)| Ok((name, SparseAdjacency::from_undirected_edges(n, edges)?)))
        .collect::<Result<Vec<_>>>()?;
    MultiViewGraph::from_views(registry, views)
}

fn annotate(view: &str, err: Error) -> Error {
    match err {
        Error::Parse { line, message } => Error::Parse {
            line,
            message: format!("view {view:?}: {message}"),
        },
        Error::Validation(m) => Error::Validation(format!("view {view:?}: {m}")),
        other => other,
    }
}

/// Reads a manifest file: one `view_name<TAB>path` per line, `#` comments.
/// Relative paths resolve against the manifest's directory.
pub fn read_manifest(path: &Path) -> Result<Vec<(String, PathBuf)>> {
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let reader = BufReader::new(File::open(path)?);
    let mut entries = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(Error::parse(idx + 1, "expected `view_name path`"));
        }
        let p = PathBuf::from(fields[1]);
        let p = if p.is_absolute() { p } else { base.join(p) };
        entries.push((fields[0].to_owned(), p));
    }
    Ok(entries)
}

/// Loads every view a manifest file lists.
pub fn load_manifest<T: Scalar>(path: &Path, weighted: bool) -> Result<MultiViewGraph<T>> {
    let entries = read_manifest(path)?;
    let mut sources = Vec::with_capacity(entries.len());
    for (name, p) in entries {
        let f = File::open(&p).map_err(|e| {
            std::io::Error::new(e.kind(), format!("view {name:?} at {}: {e}", p.display()))
        })?;
        sources.push((name, BufReader::new(f)));
    }
    build_multiview(sources, weighted)
}
