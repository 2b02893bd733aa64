use serde::Serialize;

use super::multiview::MultiViewGraph;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeSummary {
    pub min: usize,
    pub max: usize,
    pub mean: f64,
    pub median: f64,
}

/// Per-view counts in the style of a dataset summary table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViewStats {
    pub name: String,
    /// |V^(i)|: nodes with degree > 0.
    pub nodes: usize,
    /// Undirected edges, self loops counted once.
    pub edges: usize,
    pub self_loops: usize,
    pub total_weight: f64,
    /// Over active nodes only; all zeros for an empty view.
    pub degree: DegreeSummary,
}

pub fn view_stats<T: Scalar>(graph: &MultiViewGraph<T>) -> Vec<ViewStats> {
    graph
        .views()
        .iter()
        .map(|v| {
            let adj = &v.adjacency;
            let mut degs: Vec<usize> = v.active_nodes().iter().map(|&i| adj.degree(i)).collect();
            degs.sort_unstable();
            ViewStats {
                name: v.name.clone(),
                nodes: v.active_count(),
                edges: adj.edge_count(),
                self_loops: adj.self_loop_count(),
                total_weight: adj.total_weight().as_f64(),
                degree: summarize(&degs),
            }
        })
        .collect()
}

fn summarize(sorted: &[usize]) -> DegreeSummary {
    if sorted.is_empty() {
        return DegreeSummary {
            min: 0,
            max: 0,
            mean: 0.0,
            median: 0.0,
        };
    }
    let m = sorted.len();
    let median = if m % 2 == 1 {
        sorted[m / 2] as f64
    } else {
        (sorted[m / 2 - 1] + sorted[m / 2]) as f64 / 2.0
    };
    DegreeSummary {
        min: sorted[0],
        max: sorted[m - 1],
        mean: sorted.iter().sum::<usize>() as f64 / m as f64,
        median,
    }
}
