use indexmap::IndexSet;

/// Dense index into a [`NodeRegistry`].
pub type NodeId = usize;

/// Bijective map between string identifiers and contiguous indices
/// `0..n`, assigned in first-appearance order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NodeRegistry {
    ids: IndexSet<String>,
}

impl NodeRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registry holding `ids` in the given order. Duplicates keep their first
    /// position.
    pub fn from_ids<I, S>(ids: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            ids: ids.into_iter().map(Into::into).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Index of `id`, registering it at the end if unseen.
    pub fn intern(&mut self, id: &str) -> NodeId {
        if let Some(i) = self.ids.get_index_of(id) {
            return i;
        }
        self.ids.insert_full(id.to_owned()).0
    }

    pub fn get(&self, id: &str) -> Option<NodeId> {
        self.ids.get_index_of(id)
    }

    /// Identifier of a registered index.
    ///
    /// Panics when `node` is out of range.
    pub fn name(&self, node: NodeId) -> &str {
        self.ids
            .get_index(node)
            .map(String::as_str)
            .unwrap_or_else(|| panic!("node index {node} outside registry of {}", self.len()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, &str)> {
        self.ids.iter().enumerate().map(|(i, s)| (i, s.as_str()))
    }
}
