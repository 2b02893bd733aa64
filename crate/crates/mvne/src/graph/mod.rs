//! Sparse multi-view graph model and its text formats.

mod adjacency;
mod edgelist;
mod labels;
mod multiview;
mod registry;
mod stats;

pub use adjacency::SparseAdjacency;
pub use edgelist::{format_float, load_edge_list, parse_edge_list, write_edge_list};
pub use labels::{load_labels, write_labels, LabelId, LabelStore};
pub use multiview::{
    build_multiview, build_multiview_with, load_manifest, read_manifest, MultiViewGraph, View,
};
pub use registry::{NodeId, NodeRegistry};
pub use stats::{view_stats, DegreeSummary, ViewStats};
