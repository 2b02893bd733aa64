use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::NodeId;

/// Uniform random train/test partition of `nodes`.
///
/// The train side gets `round(fraction * m)` nodes, clamped so that both
/// sides keep at least one. Both halves are returned sorted.
pub fn split_labeled(
    nodes: &[NodeId],
    fraction: f64,
    seed: u64,
) -> Result<(Vec<NodeId>, Vec<NodeId>)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::validation(format!(
            "train fraction {fraction} must lie strictly between 0 and 1"
        )));
    }
    let m = nodes.len();
    if m < 2 {
        return Err(Error::validation(format!(
            "need at least 2 labeled nodes to split, have {m}"
        )));
    }
    let n_train = ((fraction * m as f64).round() as usize).clamp(1, m - 1);
    let mut shuffled = nodes.to_vec();
    shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut test = shuffled.split_off(n_train);
    let mut train = shuffled;
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}
