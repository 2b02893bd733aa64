//! Multi-label node annotations, `node<TAB>label1,label2,...` per line.

use std::collections::BTreeSet;
use std::io::BufRead;

use indexmap::IndexSet;

use super::registry::{NodeId, NodeRegistry};
use crate::error::{Error, Result};

/// Dense index into a [`LabelStore`] vocabulary.
pub type LabelId = usize;

/// Per-node label sets over a vocabulary ordered by first appearance.
/// Nodes without annotations carry an empty set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabelStore {
    vocabulary: IndexSet<String>,
    sets: Vec<BTreeSet<LabelId>>,
}

impl LabelStore {
    /// Unlabeled store for `n` nodes.
    pub fn new(n: usize) -> Self {
        Self {
            vocabulary: IndexSet::new(),
            sets: vec![BTreeSet::new(); n],
        }
    }

    /// Adds `label` to `node`, growing the vocabulary as needed.
    pub fn insert(&mut self, node: NodeId, label: &str) -> Result<LabelId> {
        if node >= self.sets.len() {
            return Err(Error::Dimension(format!(
                "node {node} outside label store of {}",
                self.sets.len()
            )));
        }
        let id = match self.vocabulary.get_index_of(label) {
            Some(id) => id,
            None => self.vocabulary.insert_full(label.to_owned()).0,
        };
        self.sets[node].insert(id);
        Ok(id)
    }

    pub fn node_count(&self) -> usize {
        self.sets.len()
    }

    pub fn label_count(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn label_name(&self, id: LabelId) -> &str {
        self.vocabulary[id].as_str()
    }

    pub fn label_id(&self, name: &str) -> Option<LabelId> {
        self.vocabulary.get_index_of(name)
    }

    pub fn labels_of(&self, node: NodeId) -> &BTreeSet<LabelId> {
        &self.sets[node]
    }

    pub fn has(&self, node: NodeId, label: LabelId) -> bool {
        self.sets[node].contains(&label)
    }

    /// Nodes carrying at least one label, ascending.
    pub fn labeled_nodes(&self) -> Vec<NodeId> {
        (0..self.sets.len())
            .filter(|&i| !self.sets[i].is_empty())
            .collect()
    }

    /// Same annotations with label sets redistributed across nodes by
    /// `perm`: node `i` receives the labels of node `perm[i]`.
    pub fn permuted(&self, perm: &[NodeId]) -> Self {
        assert_eq!(perm.len(), self.sets.len(), "permutation length");
        Self {
            vocabulary: self.vocabulary.clone(),
            sets: perm.iter().map(|&p| self.sets[p].clone()).collect(),
        }
    }
}

/// Reads a label file against an existing registry. Every identifier must
/// already be registered; otherwise all offenders are reported.
pub fn load_labels<R: BufRead>(source: R, registry: &NodeRegistry) -> Result<LabelStore> {
    let mut store = LabelStore::new(registry.len());
    let mut unknown = Vec::new();
    for (idx, line) in source.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (node, rest) = match trimmed.split_once(char::is_whitespace) {
            Some((node, rest)) => (node, rest.trim()),
            None => (trimmed, ""),
        };
        if rest.split_whitespace().count() > 1 {
            return Err(Error::parse(
                idx + 1,
                "expected `node labels` with comma-separated labels",
            ));
        }
        let Some(id) = registry.get(node) else {
            if !unknown.iter().any(|u| u == node) {
                unknown.push(node.to_owned());
            }
            continue;
        };
        for label in rest.split(',').map(str::trim).filter(|l| !l.is_empty()) {
            store.insert(id, label)?;
        }
    }
    if unknown.is_empty() {
        Ok(store)
    } else {
        Err(Error::UnknownNodes(unknown))
    }
}

/// Writes one line per labeled node, labels in vocabulary order.
pub fn write_labels<W: std::io::Write>(
    store: &LabelStore,
    registry: &NodeRegistry,
    mut out: W,
) -> Result<()> {
    for node in store.labeled_nodes() {
        let names: Vec<&str> = store
            .labels_of(node)
            .iter()
            .map(|&l| store.label_name(l))
            .collect();
        writeln!(out, "{}\t{}", registry.name(node), names.join(","))?;
    }
    Ok(())
}
