use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::graph::LabelId;

#[derive(Debug, Default, Clone, Copy)]
struct Counts {
    tp: usize,
    fp: usize,
    fn_: usize,
}

impl Counts {
    fn f1(self) -> f64 {
        let denom = 2 * self.tp + self.fp + self.fn_;
        if denom == 0 {
            0.0
        } else {
            2.0 * self.tp as f64 / denom as f64
        }
    }
}

fn per_label(
    truth: &[BTreeSet<LabelId>],
    predicted: &[BTreeSet<LabelId>],
) -> Result<BTreeMap<LabelId, Counts>> {
    if truth.len() != predicted.len() {
        return Err(Error::Dimension(format!(
            "{} true label sets, {} predicted",
            truth.len(),
            predicted.len()
        )));
    }
    let mut counts: BTreeMap<LabelId, Counts> = BTreeMap::new();
    for (t, p) in truth.iter().zip(predicted) {
        for &l in t.union(p) {
            let c = counts.entry(l).or_default();
            match (t.contains(&l), p.contains(&l)) {
                (true, true) => c.tp += 1,
                (false, true) => c.fp += 1,
                (true, false) => c.fn_ += 1,
                (false, false) => unreachable!(),
            }
        }
    }
    Ok(counts)
}

/// F1 of the true/false positive and false negative counts pooled over all
/// labels. `0/0` is 0.
pub fn micro_f1(truth: &[BTreeSet<LabelId>], predicted: &[BTreeSet<LabelId>]) -> Result<f64> {
    let pooled = per_label(truth, predicted)?
        .into_values()
        .fold(Counts::default(), |a, c| Counts {
            tp: a.tp + c.tp,
            fp: a.fp + c.fp,
            fn_: a.fn_ + c.fn_,
        });
    Ok(pooled.f1())
}

/// Unweighted mean of per-label F1 over labels that occur in the truth or
/// the predictions. 0 when no label occurs at all.
pub fn macro_f1(truth: &[BTreeSet<LabelId>], predicted: &[BTreeSet<LabelId>]) -> Result<f64> {
    let counts = per_label(truth, predicted)?;
    if counts.is_empty() {
        return Ok(0.0);
    }
    Ok(counts.values().map(|c| c.f1()).sum::<f64>() / counts.len() as f64)
}
