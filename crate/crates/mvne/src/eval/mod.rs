//! Node-label prediction on embeddings: random splits, one-vs-rest
//! logistic regression, top-k multi-label decisions and Micro/Macro-F1.

mod logistic;
mod metrics;
mod protocol;
mod split;

pub use logistic::{top_k, train_ovr, ClassifierConfig, OvrModel};
pub use metrics::{macro_f1, micro_f1};
pub use protocol::{evaluate_split, run_protocol, EvalProtocol, EvalReport, FractionScores};
pub use split::split_labeled;
