use std::collections::BTreeSet;
use std::io::Write;

use ndarray::ArrayView2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::logistic::{train_ovr, ClassifierConfig};
use super::metrics::{macro_f1, micro_f1};
use super::split::split_labeled;
use crate::error::{Error, Result};
use crate::graph::{LabelId, LabelStore};
use crate::scalar::Scalar;

/// Train-fraction sweep with repeated random splits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalProtocol {
    pub fractions: Vec<f64>,
    pub repeats: usize,
    /// Repeat `r` splits with seed `seed + r`.
    pub seed: u64,
    pub classifier: ClassifierConfig,
}

impl Default for EvalProtocol {
    fn default() -> Self {
        Self {
            fractions: (1..=9).map(|k| k as f64 / 10.0).collect(),
            repeats: 10,
            seed: 42,
            classifier: ClassifierConfig::default(),
        }
    }
}

impl EvalProtocol {
    pub fn validate(&self) -> Result<()> {
        if self.fractions.is_empty() {
            return Err(Error::validation("no train fractions given"));
        }
        if let Some(f) = self.fractions.iter().find(|&&f| !(f > 0.0 && f < 1.0)) {
            return Err(Error::validation(format!(
                "train fraction {f} not in (0, 1)"
            )));
        }
        if self.repeats == 0 {
            return Err(Error::validation("repeats must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FractionScores {
    pub fraction: f64,
    /// One score per repeat, in repeat order.
    pub micro_f1: Vec<f64>,
    pub macro_f1: Vec<f64>,
    pub mean_micro: f64,
    /// Sample standard deviation (0 for a single repeat).
    pub sd_micro: f64,
    pub mean_macro: f64,
    pub sd_macro: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub protocol: EvalProtocol,
    pub labeled_nodes: usize,
    pub label_count: usize,
    pub results: Vec<FractionScores>,
}

impl EvalReport {
    /// Plot-ready table: `fraction mean_micro sd_micro mean_macro sd_macro`.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "fraction\tmean_micro\tsd_micro\tmean_macro\tsd_macro")?;
        for r in &self.results {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}",
                r.fraction, r.mean_micro, r.sd_micro, r.mean_macro, r.sd_macro
            )?;
        }
        Ok(())
    }
}

/// Scores one split: one-vs-rest training on `train`, top-k prediction on
/// `test` with `k` equal to each node's true label count.
pub fn evaluate_split<T: Scalar>(
    x: ArrayView2<'_, T>,
    labels: &LabelStore,
    train: &[usize],
    test: &[usize],
    classifier: &ClassifierConfig,
) -> Result<(f64, f64)> {
    let model = train_ovr(x, labels, train, classifier)?;
    let mut truth: Vec<BTreeSet<LabelId>> = Vec::with_capacity(test.len());
    let mut predicted = Vec::with_capacity(test.len());
    for &node in test {
        let t = labels.labels_of(node).clone();
        let p = model.predict_multilabel(x.row(node), t.len())?;
        truth.push(t);
        predicted.push(p.into_iter().collect());
    }
    Ok((micro_f1(&truth, &predicted)?, macro_f1(&truth, &predicted)?))
}

/// Runs every (fraction, repeat) cell. Unlabeled nodes take no part.
/// Cells run in parallel; the report does not depend on scheduling.
pub fn run_protocol<T: Scalar>(
    x: ArrayView2<'_, T>,
    labels: &LabelStore,
    protocol: &EvalProtocol,
) -> Result<EvalReport> {
    protocol.validate()?;
    if labels.node_count() > x.nrows() {
        return Err(Error::Dimension(format!(
            "labels cover {} nodes, embedding has {} rows",
            labels.node_count(),
            x.nrows()
        )));
    }
    let nodes = labels.labeled_nodes();
    let cells: Vec<(usize, usize)> = (0..protocol.fractions.len())
        .flat_map(|f| (0..protocol.repeats).map(move |r| (f, r)))
        .collect();
    let scores = cells
        .par_iter()
        .map(|&(f, r)| {
            let seed = protocol.seed.wrapping_add(r as u64);
            let (train, test) = split_labeled(&nodes, protocol.fractions[f], seed)?;
            evaluate_split(x, labels, &train, &test, &protocol.classifier)
        })
        .collect::<Result<Vec<_>>>()?;

    let results = protocol
        .fractions
        .iter()
        .enumerate()
        .map(|(f, &fraction)| {
            let cell = &scores[f * protocol.repeats..(f + 1) * protocol.repeats];
            let micro: Vec<f64> = cell.iter().map(|s| s.0).collect();
            let macro_: Vec<f64> = cell.iter().map(|s| s.1).collect();
            let (mean_micro, sd_micro) = mean_sd(&micro);
            let (mean_macro, sd_macro) = mean_sd(&macro_);
            FractionScores {
                fraction,
                micro_f1: micro,
                macro_f1: macro_,
                mean_micro,
                sd_micro,
                mean_macro,
                sd_macro,
            }
        })
        .collect();
    Ok(EvalReport {
        protocol: protocol.clone(),
        labeled_nodes: nodes.len(),
        label_count: labels.label_count(),
        results,
    })
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    fn one_hot_fixture() -> (Array2<f64>, LabelStore) {
        let n = 400;
        let mut labels = LabelStore::new(n);
        let mut x = Array2::zeros((n, 4));
        for i in 0..n {
            let c = i % 4;
            x[(i, c)] = 1.0;
            labels.insert(i, &format!("c{c}")).unwrap();
        }
        (x, labels)
    }

    #[test]
    fn one_hot_features_are_perfect() {
        let (x, labels) = one_hot_fixture();
        let p = EvalProtocol {
            repeats: 1,
            ..EvalProtocol::default()
        };
        let r = run_protocol(x.view(), &labels, &p).unwrap();
        assert_eq!(r.results.len(), 9);
        for f in &r.results {
            assert_eq!(f.micro_f1, vec![1.0]);
            assert_eq!(f.macro_f1, vec![1.0]);
            assert_eq!(f.sd_micro, 0.0);
        }
    }

    #[test]
    fn deterministic_and_aggregates_consistent() {
        let (mut x, labels) = one_hot_fixture();
        // blur the features so scores vary between repeats
        for (k, v) in x.iter_mut().enumerate() {
            *v += ((k * 7919) % 13) as f64 / 10.0;
        }
        let p = EvalProtocol {
            fractions: vec![0.3, 0.5],
            repeats: 4,
            ..EvalProtocol::default()
        };
        let a = run_protocol(x.view(), &labels, &p).unwrap();
        let b = run_protocol(x.view(), &labels, &p).unwrap();
        assert_eq!(a, b);
        for f in &a.results {
            let mean = f.micro_f1.iter().sum::<f64>() / 4.0;
            assert!((mean - f.mean_micro).abs() <= 1e-12);
            assert!(f
                .micro_f1
                .iter()
                .chain(&f.macro_f1)
                .all(|s| (0.0..=1.0).contains(s)));
        }
    }

    #[test]
    fn protocol_validation() {
        let bad = EvalProtocol {
            fractions: vec![1.0],
            ..EvalProtocol::default()
        };
        assert!(bad.validate().is_err());
        let bad = EvalProtocol {
            repeats: 0,
            ..EvalProtocol::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn tsv_layout() {
        let (x, labels) = one_hot_fixture();
        let p = EvalProtocol {
            fractions: vec![0.5],
            repeats: 2,
            ..EvalProtocol::default()
        };
        let r = run_protocol(x.view(), &labels, &p).unwrap();
        let mut buf = Vec::new();
        r.write_tsv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(
            lines[0],
            "fraction\tmean_micro\tsd_micro\tmean_macro\tsd_macro"
        );
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[1], "0.5\t1\t0\t1\t0");
    }
}
