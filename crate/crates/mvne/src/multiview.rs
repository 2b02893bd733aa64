//! Joint embedding of several views: the views' adjacencies are combined as
//! `W~ = sum_i beta_i W^(i)` and a single `(H, lambda)` is fitted to `W~`,
//! so every view shares one factorization.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factorization::{factorize, FactorizeConfig, Factorized};
use crate::graph::{MultiViewGraph, NodeId, SparseAdjacency};
use crate::scalar::Scalar;

const SUM_TOL: f64 = 1e-12;

/// Convex view weights.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViewWeights<T> {
    beta: Vec<T>,
}

impl<T: Scalar> ViewWeights<T> {
    /// Accepts weights that are already non-negative and sum to 1.
    pub fn new(beta: Vec<T>) -> Result<Self> {
        check_entries(&beta)?;
        let sum: f64 = beta.iter().map(|b| b.as_f64()).sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::validation(format!(
                "view weights sum to {sum}, not 1"
            )));
        }
        Ok(Self { beta })
    }

    /// Rescales arbitrary non-negative weights to sum 1, warning when they
    /// did not already.
    pub fn from_raw(raw: &[f64]) -> Result<Self> {
        let vals: Vec<T> = raw.iter().map(|&b| T::of(b)).collect();
        check_entries(&vals)?;
        let sum: f64 = raw.iter().sum();
        if !(sum > 0.0) {
            return Err(Error::validation("view weights are all zero"));
        }
        if (sum - 1.0).abs() > SUM_TOL {
            log::warn!("view weights sum to {sum}; renormalizing to 1");
        }
        Ok(Self {
            beta: raw.iter().map(|&b| T::of(b / sum)).collect(),
        })
    }

    /// `beta_i = counts_i / sum_j counts_j`.
    pub fn proportional(counts: &[usize]) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::validation("no views to weight"));
        }
        let total: usize = counts.iter().sum();
        if total == 0 {
            return Err(Error::validation("every view is empty"));
        }
        Ok(Self {
            beta: counts
                .iter()
                .map(|&c| T::of(c as f64 / total as f64))
                .collect(),
        })
    }

    pub fn as_slice(&self) -> &[T] {
        &self.beta
    }

    pub fn len(&self) -> usize {
        self.beta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beta.is_empty()
    }
}

fn check_entries<T: Scalar>(beta: &[T]) -> Result<()> {
    if beta.is_empty() {
        return Err(Error::validation("no view weights given"));
    }
    if beta.iter().any(|&b| !(b >= T::zero()) || !b.is_finite()) {
        return Err(Error::validation(
            "view weights must be finite and non-negative",
        ));
    }
    Ok(())
}

/// Weights proportional to the number of active nodes in each view.
pub fn default_betas<T: Scalar>(graph: &MultiViewGraph<T>) -> Result<ViewWeights<T>> {
    ViewWeights::proportional(&graph.active_counts())
}

/// Entrywise `sum_i scales_i W^(i)` over the global index space. Views with
/// a zero scale are skipped, so the support is the union of the supports of
/// positively scaled views. Duplicated positions are summed in view order.
pub fn combine_scaled<T: Scalar>(
    graph: &MultiViewGraph<T>,
    scales: &[T],
) -> Result<SparseAdjacency<T>> {
    if scales.len() != graph.view_count() {
        return Err(Error::Dimension(format!(
            "{} scale factors for {} views",
            scales.len(),
            graph.view_count()
        )));
    }
    let n = graph.node_count();
    let contributing: Vec<(&SparseAdjacency<T>, T)> = graph
        .views()
        .iter()
        .zip(scales)
        .filter(|(_, &s)| s > T::zero())
        .map(|(v, &s)| (&v.adjacency, s))
        .collect();
    for (adj, _) in &contributing {
        if adj.n() != n {
            return Err(Error::Dimension(format!(
                "view spans {} nodes, registry {n}",
                adj.n()
            )));
        }
    }

    let mut offsets = Vec::with_capacity(n + 1);
    offsets.push(0);
    let mut columns = Vec::new();
    let mut values = Vec::new();
    let mut row: Vec<(NodeId, T)> = Vec::new();
    for i in 0..n {
        row.clear();
        for (adj, s) in &contributing {
            let (cols, vals) = adj.row(i);
            row.extend(cols.iter().zip(vals).map(|(&j, &w)| (j, w * *s)));
        }
        // stable: equal columns stay in view order
        row.sort_by_key(|&(j, _)| j);
        let mut k = 0;
        while k < row.len() {
            let (j, mut acc) = row[k];
            k += 1;
            while k < row.len() && row[k].0 == j {
                acc += row[k].1;
                k += 1;
            }
            if acc > T::zero() {
                columns.push(j);
                values.push(acc);
            }
        }
        offsets.push(columns.len());
    }
    Ok(SparseAdjacency::from_csr_parts(n, offsets, columns, values))
}

/// `W~ = sum_i beta_i W^(i)`; with `normalize_views`, each view is first
/// scaled to unit total weight (edgeless views contribute nothing).
pub fn combine_views<T: Scalar>(
    graph: &MultiViewGraph<T>,
    weights: &ViewWeights<T>,
    normalize_views: bool,
) -> Result<SparseAdjacency<T>> {
    if weights.len() != graph.view_count() {
        return Err(Error::Dimension(format!(
            "{} view weights for {} views",
            weights.len(),
            graph.view_count()
        )));
    }
    let scales: Vec<T> = graph
        .views()
        .iter()
        .zip(weights.as_slice())
        .map(|(v, &b)| {
            let total = v.adjacency.total_weight();
            match (normalize_views, total > T::zero()) {
                (false, _) => b,
                (true, true) => b * (T::one() / total),
                (true, false) => T::zero(),
            }
        })
        .collect();
    combine_scaled(graph, &scales)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BetaMode {
    /// Proportional to active-node counts.
    DefaultBySize,
    /// Caller-supplied, renormalized to sum 1.
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MvneConfig {
    pub factorize: FactorizeConfig,
    pub beta_mode: BetaMode,
    pub normalize_views: bool,
}

impl Default for MvneConfig {
    fn default() -> Self {
        Self {
            factorize: FactorizeConfig::default(),
            beta_mode: BetaMode::DefaultBySize,
            normalize_views: true,
        }
    }
}

impl MvneConfig {
    pub fn betas<T: Scalar>(&self, graph: &MultiViewGraph<T>) -> Result<ViewWeights<T>> {
        match &self.beta_mode {
            BetaMode::DefaultBySize => default_betas(graph),
            BetaMode::Explicit(raw) => {
                if raw.len() != graph.view_count() {
                    return Err(Error::validation(format!(
                        "{} explicit view weights for {} views",
                        raw.len(),
                        graph.view_count()
                    )));
                }
                ViewWeights::from_raw(raw)
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct MvneOutput<T> {
    pub betas: ViewWeights<T>,
    /// The matrix that was factorized.
    pub combined: SparseAdjacency<T>,
    pub result: Factorized<T>,
}

/// Factorizes the combined view matrix. The embedding has one row per
/// registry node, including nodes missing from some or all views.
pub fn mvne_embed<T: Scalar>(
    graph: &MultiViewGraph<T>,
    config: &MvneConfig,
) -> Result<MvneOutput<T>> {
    let betas = config.betas(graph)?;
    let combined = combine_views(graph, &betas, config.normalize_views)?;
    let result = factorize(&combined, &config.factorize)?;
    Ok(MvneOutput {
        betas,
        combined,
        result,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_multiview, NodeRegistry};

    fn two_views(w1: f64, w2: f64) -> MultiViewGraph<f64> {
        let reg = NodeRegistry::from_ids(["a", "b"]);
        let v1 = SparseAdjacency::from_undirected_edges(2, [(0, 1, w1)]).unwrap();
        let v2 = SparseAdjacency::from_undirected_edges(2, [(0, 1, w2)]).unwrap();
        MultiViewGraph::from_views(reg, vec![("v1", v1), ("v2", v2)]).unwrap()
    }

    #[test]
    fn equal_sizes_equal_weights() {
        let g = two_views(1.0, 3.0);
        assert_eq!(default_betas(&g).unwrap().as_slice(), &[0.5, 0.5]);
    }

    #[test]
    fn one_view_gets_everything() {
        let g: MultiViewGraph<f64> =
            build_multiview(vec![("v", "a b\n".as_bytes())], false).unwrap();
        assert_eq!(default_betas(&g).unwrap().as_slice(), &[1.0]);
    }

    #[test]
    fn all_empty_views_rejected() {
        let reg = NodeRegistry::from_ids(["a"]);
        let g =
            MultiViewGraph::from_views(reg, vec![("e", SparseAdjacency::<f64>::empty(1))]).unwrap();
        assert!(default_betas(&g).is_err());
    }

    #[test]
    fn weighted_sum_without_normalization() {
        let g = two_views(1.0, 3.0);
        let b = ViewWeights::new(vec![0.5, 0.5]).unwrap();
        let c = combine_views(&g, &b, false).unwrap();
        assert_eq!(c.to_dense(), ndarray::array![[0.0, 2.0], [2.0, 0.0]]);
    }

    #[test]
    fn normalized_sum_has_unit_total() {
        let g = two_views(1.0, 3.0);
        let b = ViewWeights::new(vec![0.5, 0.5]).unwrap();
        let c = combine_views(&g, &b, true).unwrap();
        // totals 2 and 6 scale to 1 each; by direct summation
        let direct: f64 = c.values().iter().sum();
        assert!((direct - 1.0).abs() < 1e-15);
        assert!((c.total_weight() - 1.0).abs() < 1e-15);
        c.validate().unwrap();
    }

    #[test]
    fn single_view_identity() {
        let g = two_views(1.0, 3.0);
        let single =
            MultiViewGraph::single(g.registry().clone(), "v", g.views()[1].adjacency.clone())
                .unwrap();
        let c = combine_views(&single, &ViewWeights::new(vec![1.0]).unwrap(), false).unwrap();
        assert_eq!(c, g.views()[1].adjacency);
    }

    #[test]
    fn zero_weight_view_leaves_support() {
        let reg = NodeRegistry::from_ids(["a", "b", "c"]);
        let v1 = SparseAdjacency::from_undirected_edges(3, [(0, 1, 1.0)]).unwrap();
        let v2 = SparseAdjacency::from_undirected_edges(3, [(1, 2, 1.0)]).unwrap();
        let g = MultiViewGraph::from_views(reg, vec![("v1", v1), ("v2", v2)]).unwrap();
        let c = combine_views(&g, &ViewWeights::new(vec![1.0, 0.0]).unwrap(), false).unwrap();
        assert_eq!(c.nnz(), 2);
        assert_eq!(c.get(1, 2), None);
    }

    #[test]
    fn explicit_weights_are_renormalized() {
        let w = ViewWeights::<f64>::from_raw(&[1.0, 3.0]).unwrap();
        assert_eq!(w.as_slice(), &[0.25, 0.75]);
        assert!(ViewWeights::<f64>::from_raw(&[0.0, 0.0]).is_err());
        assert!(ViewWeights::<f64>::from_raw(&[-1.0, 2.0]).is_err());
        assert!(ViewWeights::<f64>::new(vec![0.3, 0.3]).is_err());
    }

    #[test]
    fn mismatched_weights_rejected() {
        let g = two_views(1.0, 1.0);
        let b = ViewWeights::new(vec![1.0]).unwrap();
        assert!(matches!(
            combine_views(&g, &b, false),
            Err(Error::Dimension(_))
        ));
        let cfg = MvneConfig {
            beta_mode: BetaMode::Explicit(vec![1.0, 1.0, 1.0]),
            ..MvneConfig::default()
        };
        assert!(cfg.betas(&g).is_err());
    }
}
