//! Compressed sparse row storage for one symmetric, weighted view.

use ndarray::Array2;

use super::registry::NodeId;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Symmetric weighted adjacency in CSR layout.
///
/// Invariants: entry `(i, j)` is stored with weight `w` iff `(j, i)` is stored
/// with weight `w`; every stored weight is finite and `> 0`; column indices
/// within a row are strictly increasing; `total_weight` is the sum of the
/// stored values in storage order.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseAdjacency<T> {
    n: usize,
    offsets: Vec<usize>,
    columns: Vec<NodeId>,
    values: Vec<T>,
    total_weight: T,
}

impl<T: Scalar> SparseAdjacency<T> {
    /// Edgeless adjacency over `n` nodes.
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            offsets: vec![0; n + 1],
            columns: Vec::new(),
            values: Vec::new(),
            total_weight: T::zero(),
        }
    }

    /// Builds the symmetrized adjacency of an undirected edge list.
    ///
    /// Every `(u, v, w)` with `u != v` is stored in both directions; a self
    /// loop is stored once on the diagonal. Repeated pairs (in either
    /// orientation) have their weights summed.
    pub fn from_undirected_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId, T)>,
    {
        let mut entries = Vec::new();
        for (u, v, w) in edges {
            if u >= n || v >= n {
                return Err(Error::Dimension(format!(
                    "edge ({u}, {v}) outside node range 0..{n}"
                )));
            }
            if !(w > T::zero()) || !w.is_finite() {
                return Err(Error::validation(format!(
                    "edge ({u}, {v}) has non-positive or non-finite weight {w}"
                )));
            }
            entries.push((u, v, w));
            if u != v {
                entries.push((v, u, w));
            }
        }
        Ok(Self::from_directed_entries(n, entries))
    }

    /// Sorts and merges already-validated directed entries. Symmetry is the
    /// caller's responsibility.
    pub(crate) fn from_directed_entries(n: usize, mut entries: Vec<(NodeId, NodeId, T)>) -> Self {
        // stable sort keeps the summation order of duplicates reproducible
        entries.sort_by_key(|&(i, j, _)| (i, j));
        let mut offsets = vec![0usize; n + 1];
        let mut columns = Vec::with_capacity(entries.len());
        let mut values: Vec<T> = Vec::with_capacity(entries.len());
        let mut last: Option<(NodeId, NodeId)> = None;
        for (i, j, w) in entries {
            if last == Some((i, j)) {
                *values.last_mut().expect("merged entry exists") += w;
                continue;
            }
            last = Some((i, j));
            offsets[i + 1] += 1;
            columns.push(j);
            values.push(w);
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let total_weight = values.iter().copied().sum();
        Self {
            n,
            offsets,
            columns,
            values,
            total_weight,
        }
    }

    /// Builds from CSR parts that already satisfy every invariant except the
    /// cached total.
    pub(crate) fn from_csr_parts(
        n: usize,
        offsets: Vec<usize>,
        columns: Vec<NodeId>,
        values: Vec<T>,
    ) -> Self {
        debug_assert_eq!(offsets.len(), n + 1);
        debug_assert_eq!(columns.len(), values.len());
        let total_weight = values.iter().copied().sum();
        Self {
            n,
            offsets,
            columns,
            values,
            total_weight,
        }
    }

    /// Dense symmetric matrix to CSR. Zero entries are dropped.
    pub fn from_dense(w: &Array2<T>) -> Result<Self> {
        let (rows, cols) = w.dim();
        if rows != cols {
            return Err(Error::Dimension(format!("matrix is {rows}x{cols}")));
        }
        let mut offsets = Vec::with_capacity(rows + 1);
        offsets.push(0);
        let mut columns = Vec::new();
        let mut values = Vec::new();
        for i in 0..rows {
            for j in 0..cols {
                let v = w[(i, j)];
                if v != w[(j, i)] {
                    return Err(Error::validation(format!(
                        "matrix not symmetric at ({i}, {j})"
                    )));
                }
                if v < T::zero() || !v.is_finite() {
                    return Err(Error::validation(format!(
                        "invalid weight {v} at ({i}, {j})"
                    )));
                }
                if v > T::zero() {
                    columns.push(j);
                    values.push(v);
                }
            }
            offsets.push(columns.len());
        }
        Ok(Self::from_csr_parts(rows, offsets, columns, values))
    }

    pub fn to_dense(&self) -> Array2<T> {
        let mut out = Array2::zeros((self.n, self.n));
        for (i, j, w) in self.entries() {
            out[(i, j)] = w;
        }
        out
    }

    /// Global node count (rows of the matrix).
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of stored (directed) entries.
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn total_weight(&self) -> T {
        self.total_weight
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn columns(&self) -> &[NodeId] {
        &self.columns
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Column indices and weights of row `i`.
    pub fn row(&self, i: NodeId) -> (&[NodeId], &[T]) {
        let (a, b) = (self.offsets[i], self.offsets[i + 1]);
        (&self.columns[a..b], &self.values[a..b])
    }

    /// Number of stored neighbours of `i` (a self loop counts once).
    pub fn degree(&self, i: NodeId) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.offsets.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn get(&self, i: NodeId, j: NodeId) -> Option<T> {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).ok().map(|k| vals[k])
    }

    /// All stored entries `(i, j, w)` in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (NodeId, NodeId, T)> + '_ {
        (0..self.n).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &w)| (i, j, w))
        })
    }

    /// Undirected edge count: off-diagonal entries / 2 plus self loops.
    pub fn edge_count(&self) -> usize {
        let loops = self.self_loop_count();
        (self.nnz() - loops) / 2 + loops
    }

    pub fn self_loop_count(&self) -> usize {
        (0..self.n).filter(|&i| self.get(i, i).is_some()).count()
    }

    /// Nodes with at least one stored entry.
    pub fn active_nodes(&self) -> Vec<NodeId> {
        (0..self.n).filter(|&i| self.degree(i) > 0).collect()
    }

    /// Same entries over a larger node range; the extra nodes are isolated.
    pub fn with_node_count(mut self, n: usize) -> Result<Self> {
        if n < self.n {
            return Err(Error::Dimension(format!(
                "cannot shrink adjacency from {} to {n} nodes",
                self.n
            )));
        }
        let nnz = self.nnz();
        self.offsets.resize(n + 1, nnz);
        self.n = n;
        Ok(self)
    }

    /// Every weight multiplied by `factor` (which must be positive).
    pub fn scaled(&self, factor: T) -> Result<Self> {
        if !(factor > T::zero()) || !factor.is_finite() {
            return Err(Error::validation(format!(
                "scale factor {factor} must be positive"
            )));
        }
        let values = self.values.iter().map(|&w| w * factor).collect();
        Ok(Self::from_csr_parts(
            self.n,
            self.offsets.clone(),
            self.columns.clone(),
            values,
        ))
    }

    /// Rescaled to unit total weight. Edgeless matrices are returned as-is.
    pub fn normalized(&self) -> Self {
        if self.total_weight > T::zero() {
            let inv = T::one() / self.total_weight;
            let values = self.values.iter().map(|&w| w * inv).collect();
            Self::from_csr_parts(self.n, self.offsets.clone(), self.columns.clone(), values)
        } else {
            self.clone()
        }
    }

    /// Checks every structural invariant; used by tests and after ingestion.
    pub fn validate(&self) -> Result<()> {
        if self.offsets.len() != self.n + 1 || self.offsets[0] != 0 {
            return Err(Error::validation("malformed row offsets"));
        }
        if *self.offsets.last().unwrap() != self.values.len() {
            return Err(Error::validation("row offsets do not cover values"));
        }
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            if cols.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::validation(format!(
                    "row {i} columns not strictly increasing"
                )));
            }
            for (&j, &w) in cols.iter().zip(vals) {
                if j >= self.n {
                    return Err(Error::validation(format!(
                        "column {j} out of range in row {i}"
                    )));
                }
                if !(w > T::zero()) || !w.is_finite() {
                    return Err(Error::validation(format!(
                        "entry ({i}, {j}) has weight {w}"
                    )));
                }
                if self.get(j, i) != Some(w) {
                    return Err(Error::validation(format!("entry ({i}, {j}) has no mirror")));
                }
            }
        }
        let sum: T = self.values.iter().copied().sum();
        if sum != self.total_weight {
            return Err(Error::validation("cached total weight is stale"));
        }
        Ok(())
    }
}
