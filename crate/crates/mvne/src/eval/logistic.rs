//! One-vs-rest L2-regularized logistic regression, fitted per label by
//! full-batch damped Newton iterations with Armijo backtracking.

use ndarray::{Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{LabelId, LabelStore, NodeId};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierConfig {
    /// Strength of the `reg * |w|^2 / 2` penalty added to the summed
    /// log-loss, i.e. `1 / C` in the usual liblinear parametrization. The
    /// bias is unpenalized.
    pub reg: f64,
    /// Stop once the gradient norm falls below this.
    pub grad_tol: f64,
    /// Newton iterations per label.
    pub max_iters: usize,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self {
            reg: 1.0,
            grad_tol: 1e-6,
            max_iters: 200,
        }
    }
}

/// One binary classifier per vocabulary label.
#[derive(Debug, Clone, PartialEq)]
pub struct OvrModel<T> {
    /// labels x d
    pub weights: Array2<T>,
    /// `-inf` for labels without positive training examples.
    pub bias: Vec<T>,
    pub reg: f64,
    /// Final gradient norm per label (0 for constant classifiers).
    pub gradient_norms: Vec<f64>,
    pub iterations: Vec<usize>,
}

impl<T: Scalar> OvrModel<T> {
    pub fn label_count(&self) -> usize {
        self.bias.len()
    }

    /// Decision values `w_l . x + b_l` for every label.
    pub fn scores(&self, x: ArrayView1<'_, T>) -> Vec<T> {
        self.weights
            .rows()
            .into_iter()
            .zip(&self.bias)
            .map(|(w, &b)| w.dot(&x) + b)
            .collect()
    }

    /// The `k` best-scoring labels; ties go to the smaller label id.
    pub fn predict_multilabel(&self, x: ArrayView1<'_, T>, k: usize) -> Result<Vec<LabelId>> {
        top_k(&self.scores(x), k)
    }
}

/// Indices of the `k` largest scores, ties broken by ascending index.
pub fn top_k<T: Scalar>(scores: &[T], k: usize) -> Result<Vec<LabelId>> {
    if k > scores.len() {
        return Err(Error::validation(format!(
            "asked for {k} labels from a vocabulary of {}",
            scores.len()
        )));
    }
    let mut order: Vec<LabelId> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    order.truncate(k);
    order.sort_unstable();
    Ok(order)
}

/// Fits one classifier per label on the rows of `x` listed in `train`.
pub fn train_ovr<T: Scalar>(
    x: ArrayView2<'_, T>,
    labels: &LabelStore,
    train: &[NodeId],
    config: &ClassifierConfig,
) -> Result<OvrModel<T>> {
    if train.is_empty() {
        return Err(Error::validation("training set is empty"));
    }
    if let Some(&bad) = train
        .iter()
        .find(|&&i| i >= x.nrows() || i >= labels.node_count())
    {
        return Err(Error::Dimension(format!(
            "training node {bad} has no feature row or label entry"
        )));
    }
    if train.iter().all(|&i| labels.labels_of(i).is_empty()) {
        return Err(Error::validation("no labels present among training nodes"));
    }
    if !(config.reg >= 0.0) {
        return Err(Error::validation("regularization must be non-negative"));
    }
    let d = x.ncols();
    let rows: Vec<ArrayView1<'_, T>> = train.iter().map(|&i| x.row(i)).collect();
    let n_labels = labels.label_count();
    let mut weights = Array2::zeros((n_labels, d));
    let mut bias = vec![T::zero(); n_labels];
    let mut gradient_norms = vec![0.0; n_labels];
    let mut iterations = vec![0; n_labels];
    for l in 0..n_labels {
        let y: Vec<bool> = train.iter().map(|&i| labels.has(i, l)).collect();
        if !y.iter().any(|&p| p) {
            bias[l] = T::neg_infinity();
            continue;
        }
        let fit = fit_binary(&rows, &y, config);
        weights
            .row_mut(l)
            .assign(&ndarray::ArrayView1::from(&fit.w));
        bias[l] = fit.b;
        gradient_norms[l] = fit.grad_norm;
        iterations[l] = fit.iterations;
    }
    Ok(OvrModel {
        weights,
        bias,
        reg: config.reg,
        gradient_norms,
        iterations,
    })
}

struct BinaryFit<T> {
    w: Vec<T>,
    b: T,
    grad_norm: f64,
    iterations: usize,
}

/// `ln(1 + exp(-t))` without overflow.
fn softplus_neg<T: Scalar>(t: T) -> T {
    (-t).max(T::zero()) + (-t.abs()).exp().ln_1p()
}

fn sigmoid<T: Scalar>(t: T) -> T {
    if t >= T::zero() {
        T::one() / (T::one() + (-t).exp())
    } else {
        let e = t.exp();
        e / (T::one() + e)
    }
}

/// Summed log-loss plus penalty at `(w, b)`.
pub(crate) fn binary_objective<T: Scalar>(
    rows: &[ArrayView1<'_, T>],
    y: &[bool],
    w: &[T],
    b: T,
    reg: T,
) -> T {
    let wv = ArrayView1::from(w);
    let loss: T = rows
        .iter()
        .zip(y)
        .map(|(x, &pos)| {
            let z = x.dot(&wv) + b;
            softplus_neg(if pos { z } else { -z })
        })
        .sum();
    loss + reg * T::of(0.5) * w.iter().map(|&v| v * v).sum::<T>()
}

fn gradient<T: Scalar>(
    rows: &[ArrayView1<'_, T>],
    y: &[bool],
    w: &[T],
    b: T,
    reg: T,
    gw: &mut [T],
) -> T {
    let wv = ArrayView1::from(w);
    gw.iter_mut().for_each(|g| *g = T::zero());
    let mut gb = T::zero();
    for (x, &pos) in rows.iter().zip(y) {
        let resid = sigmoid(x.dot(&wv) + b) - if pos { T::one() } else { T::zero() };
        gb += resid;
        for (g, &xi) in gw.iter_mut().zip(x.iter()) {
            *g += resid * xi;
        }
    }
    for (g, &wi) in gw.iter_mut().zip(w) {
        *g += reg * wi;
    }
    gb
}

/// Hessian over `(w, b)`, row-major `(d + 1)^2`, the bias last.
fn hessian<T: Scalar>(rows: &[ArrayView1<'_, T>], w: &[T], b: T, reg: T, out: &mut [T]) {
    let d = w.len();
    let k = d + 1;
    let wv = ArrayView1::from(w);
    out.iter_mut().for_each(|h| *h = T::zero());
    let mut xt = vec![T::one(); k];
    for x in rows {
        let p = sigmoid(x.dot(&wv) + b);
        let c = p * (T::one() - p);
        for (dst, &src) in xt.iter_mut().zip(x.iter()) {
            *dst = src;
        }
        for r in 0..k {
            let cr = c * xt[r];
            for (h, &xc) in out[r * k..=r * k + r].iter_mut().zip(&xt) {
                *h += cr * xc;
            }
        }
    }
    for r in 0..k {
        for col in 0..r {
            out[col * k + r] = out[r * k + col];
        }
    }
    for r in 0..d {
        out[r * k + r] += reg;
    }
}

/// Solves `a x = rhs` for symmetric positive definite `a` in place by
/// Cholesky; `None` when `a` is not numerically positive definite.
fn cholesky_solve<T: Scalar>(a: &mut [T], rhs: &mut [T]) -> Option<()> {
    let k = rhs.len();
    for j in 0..k {
        let mut diag = a[j * k + j];
        for p in 0..j {
            diag -= a[j * k + p] * a[j * k + p];
        }
        if !(diag > T::zero()) {
            return None;
        }
        let diag = diag.sqrt();
        a[j * k + j] = diag;
        for i in j + 1..k {
            let mut v = a[i * k + j];
            for p in 0..j {
                v -= a[i * k + p] * a[j * k + p];
            }
            a[i * k + j] = v / diag;
        }
    }
    for i in 0..k {
        let mut v = rhs[i];
        for p in 0..i {
            v -= a[i * k + p] * rhs[p];
        }
        rhs[i] = v / a[i * k + i];
    }
    for i in (0..k).rev() {
        let mut v = rhs[i];
        for p in i + 1..k {
            v -= a[p * k + i] * rhs[p];
        }
        rhs[i] = v / a[i * k + i];
    }
    Some(())
}

/// Damped Newton with Armijo backtracking. Falls back to the gradient
/// direction when the Hessian is numerically singular (e.g. a bias with no
/// curvature left on separable data).
fn fit_binary<T: Scalar>(
    rows: &[ArrayView1<'_, T>],
    y: &[bool],
    config: &ClassifierConfig,
) -> BinaryFit<T> {
    let d = rows[0].len();
    let k = d + 1;
    let reg = T::of(config.reg);
    let mut w = vec![T::zero(); d];
    let mut b = T::zero();
    let mut gw = vec![T::zero(); d];
    let mut h = vec![T::zero(); k * k];
    let mut dir = vec![T::zero(); k];
    let mut trial = vec![T::zero(); d];
    let mut f = binary_objective(rows, y, &w, b, reg);
    let mut iterations = 0;
    let mut grad_norm;
    loop {
        let gb = gradient(rows, y, &w, b, reg, &mut gw);
        let sq: T = gw.iter().map(|&g| g * g).sum::<T>() + gb * gb;
        grad_norm = sq.sqrt().as_f64();
        if grad_norm < config.grad_tol || iterations >= config.max_iters {
            break;
        }
        iterations += 1;
        hessian(rows, &w, b, reg, &mut h);
        dir[..d].copy_from_slice(&gw);
        dir[d] = gb;
        if cholesky_solve(&mut h, &mut dir).is_none() {
            dir[..d].copy_from_slice(&gw);
            dir[d] = gb;
        }
        // descent along -dir
        let slope: T = gw.iter().zip(&dir).map(|(&g, &p)| g * p).sum::<T>() + gb * dir[d];
        if !(slope > T::zero()) {
            break;
        }
        let mut step = T::one();
        let mut accepted = false;
        for _ in 0..60 {
            for i in 0..d {
                trial[i] = w[i] - step * dir[i];
            }
            let tb = b - step * dir[d];
            let ft = binary_objective(rows, y, &trial, tb, reg);
            if ft <= f - T::of(1e-4) * step * slope {
                std::mem::swap(&mut w, &mut trial);
                b = tb;
                f = ft;
                accepted = true;
                break;
            }
            step *= T::of(0.5);
        }
        if !accepted {
            // no representable descent left
            break;
        }
    }
    BinaryFit {
        w,
        b,
        grad_norm,
        iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};

    fn store(assignments: &[&[&str]]) -> LabelStore {
        let mut s = LabelStore::new(assignments.len());
        for (i, ls) in assignments.iter().enumerate() {
            for l in *ls {
                s.insert(i, l).unwrap();
            }
        }
        s
    }

    #[test]
    fn top_k_examples() {
        assert_eq!(top_k(&[0.9, 0.2, 0.8], 2).unwrap(), vec![0, 2]);
        assert!(top_k(&[0.9, 0.2, 0.8], 0).unwrap().is_empty());
        assert_eq!(top_k(&[0.5, 0.5], 1).unwrap(), vec![0]);
        assert!(top_k(&[0.5, 0.5], 3).is_err());
    }

    #[test]
    fn separable_line() {
        let xs = [-2.0, -1.5, -1.0, -0.5, -0.2, 0.2, 0.5, 1.0, 1.5, 2.0];
        let x = Array2::from_shape_fn((10, 1), |(i, _)| xs[i]);
        let s = store(&xs.map(|v| if v > 0.0 { &["pos"][..] } else { &["neg"][..] }));
        let train: Vec<_> = (0..10).collect();
        let cfg = ClassifierConfig {
            reg: 1e-3,
            ..Default::default()
        };
        let m = train_ovr(x.view(), &s, &train, &cfg).unwrap();
        let pos = s.label_id("pos").unwrap();
        let correct = (0..10)
            .filter(|&i| {
                let p = m.predict_multilabel(x.row(i), 1).unwrap()[0];
                (p == pos) == (xs[i] > 0.0)
            })
            .count();
        assert_eq!(correct, 10);
    }

    #[test]
    fn converges_to_stationary_point() {
        let x = array![
            [0.9, 0.1],
            [0.8, 0.2],
            [0.3, 0.7],
            [0.1, 0.9],
            [0.5, 0.5],
            [0.6, 0.4]
        ];
        let s = store(&[&["a"], &["a"], &["b"], &["b"], &["a", "b"], &["b"]]);
        let train: Vec<_> = (0..6).collect();
        let cfg = ClassifierConfig::default();
        let m = train_ovr(x.view(), &s, &train, &cfg).unwrap();
        for (l, &g) in m.gradient_norms.iter().enumerate() {
            assert!(g < 1e-6, "label {l} gradient {g}");
        }
        // never worse than the zero classifier
        let rows: Vec<_> = train.iter().map(|&i| x.row(i)).collect();
        for l in 0..2 {
            let y: Vec<bool> = train.iter().map(|&i| s.has(i, l)).collect();
            let at_fit = binary_objective(
                &rows,
                &y,
                m.weights.row(l).as_slice().unwrap(),
                m.bias[l],
                1.0,
            );
            let at_zero = binary_objective(&rows, &y, &[0.0, 0.0], 0.0, 1.0);
            assert!(at_fit <= at_zero);
        }
    }

    #[test]
    fn all_positive_label_dominates_absent_label() {
        let x = array![[0.2, 0.8], [0.7, 0.3], [0.5, 0.5], [0.1, 0.9]];
        // "u" on every training node, "v" only on node 3 (held out)
        let s = store(&[&["u"], &["u"], &["u"], &["v"]]);
        let m = train_ovr(x.view(), &s, &[0, 1, 2], &ClassifierConfig::default()).unwrap();
        let (u, v) = (s.label_id("u").unwrap(), s.label_id("v").unwrap());
        assert_eq!(m.bias[v], f64::NEG_INFINITY);
        for i in 0..4 {
            let sc = m.scores(x.row(i));
            assert!(sc[u] > sc[v]);
        }
    }

    #[test]
    fn rejects_empty_or_unlabeled_training() {
        let x = array![[1.0], [2.0]];
        let s = store(&[&["a"], &[]]);
        assert!(train_ovr(x.view(), &s, &[], &ClassifierConfig::default()).is_err());
        assert!(train_ovr(x.view(), &s, &[1], &ClassifierConfig::default()).is_err());
        assert!(train_ovr(x.view(), &s, &[5], &ClassifierConfig::default()).is_err());
    }

    #[test]
    fn numerically_stable_helpers() {
        assert!(softplus_neg(1e4f64).abs() < 1e-300);
        assert!((softplus_neg(-1e4f64) - 1e4).abs() < 1e-9);
        assert_eq!(sigmoid(-1e4f64), 0.0);
        assert_eq!(sigmoid(1e4f64), 1.0);
    }
}
