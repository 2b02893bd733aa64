//! Network embedding by graph factorization clustering.
//!
//! A view's symmetric adjacency `W` is approximated by `H diag(lambda) H^T`
//! where `H` links nodes to `d` latent communities. A node's embedding is its
//! soft membership over those communities. Several views over one node registry are
//! embedded jointly by factorizing their weighted combination. The crate
//! also ships the node-label-prediction harness used to score embeddings
//! and a synthetic stochastic-block-model generator with dense reference
//! implementations for testing.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix `f64`, which is what the command-line tool uses.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod eval;
pub mod factorization;
pub mod graph;
pub mod multiview;
pub mod scalar;
pub mod testkit;

pub use error::{Error, Result};
pub use factorization::{
    factorize, factorize_from, init_factorization, kl_objective, update_step, Factorization,
    FactorizeConfig, FactorizeReport, Factorized, Normalization, UpdateForm,
};
pub use graph::{LabelStore, MultiViewGraph, NodeId, NodeRegistry, SparseAdjacency};
pub use multiview::{combine_views, default_betas, mvne_embed, MvneConfig, ViewWeights};
pub use scalar::Scalar;

/// `f64` adjacency.
pub type Adjacency = SparseAdjacency<f64>;
/// `f64` multi-view graph.
pub type Graph = MultiViewGraph<f64>;
/// `f64` factorization.
pub type Gfc = Factorization<f64>;
/// `f64` view weights.
pub type Betas = ViewWeights<f64>;
