//! Reference implementations and synthetic data for tests and benchmarks.
//!
//! The dense routines recompute everything over full `n x n` matrices and
//! solve the per-row constraint by plain bisection, so they share no
//! numerical code with the sparse path beyond the initializer.

mod dense;
mod sbm;

pub use dense::{dense_factorize_oracle, dense_objective, dense_update, DenseRun, DENSE_MAX_NODES};
pub use sbm::{
    erdos_renyi, generate_multiview_sbm, random_graph, SbmDataset, SbmInfo, SbmSpec, ViewInfo,
    ViewNoise,
};
