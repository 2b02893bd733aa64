use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::factorization::{
    init_factorization, Factorization, FactorizeConfig, Normalization, UpdateForm,
};

/// Largest graph the dense routines accept.
pub const DENSE_MAX_NODES: usize = 64;

/// Result of [`dense_factorize_oracle`]: the best iterate plus every iterate
/// visited, starting with the initialization.
#[derive(Debug, Clone)]
pub struct DenseRun {
    pub best: Factorization<f64>,
    pub iterates: Vec<Factorization<f64>>,
    pub objective_trace: Vec<f64>,
    pub converged: bool,
}

fn check(w: &Array2<f64>) -> Result<()> {
    let n = w.nrows();
    if w.ncols() != n {
        return Err(Error::Dimension(format!(
            "{}x{} matrix is not square",
            n,
            w.ncols()
        )));
    }
    if n > DENSE_MAX_NODES {
        return Err(Error::validation(format!(
            "dense oracle limited to {DENSE_MAX_NODES} nodes, got {n}"
        )));
    }
    for i in 0..n {
        for j in 0..n {
            if w[(i, j)] != w[(j, i)] || w[(i, j)] < 0.0 || !w[(i, j)].is_finite() {
                return Err(Error::validation(format!("bad entry at ({i}, {j})")));
            }
        }
    }
    Ok(())
}

fn reconstruction(fac: &Factorization<f64>) -> Array2<f64> {
    let hl = &fac.h * &fac.lambda;
    hl.dot(&fac.h.t())
}

/// Generalized KL divergence summed over every pair.
pub fn dense_objective(w: &Array2<f64>, fac: &Factorization<f64>, epsilon: f64) -> Result<f64> {
    check(w)?;
    let y = reconstruction(fac);
    let mut total = 0.0;
    for ((i, j), &wij) in w.indexed_iter() {
        let yij = y[(i, j)];
        if wij > 0.0 {
            total += wij * (wij / yij.max(epsilon)).ln() - wij;
        }
        total += yij;
    }
    Ok(total)
}

/// Positive root of `q t^3 + mu t - b` by bisection.
fn root(q: f64, mu: f64, b: f64) -> f64 {
    if b <= 0.0 {
        return if mu < 0.0 { (-mu / q).sqrt() } else { 0.0 };
    }
    let f = |t: f64| q * t * t * t + mu * t - b;
    let mut hi = 1.0;
    while f(hi) <= 0.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 1e-17 * hi {
            break;
        }
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `w_p t_p` with `sum_p w_p t_p = target`, the multiplier found by bisection.
fn solve_constrained(w: &[f64], q: &[f64], b: &[f64], target: f64) -> Vec<f64> {
    let q: Vec<f64> = q.iter().map(|&x| x.max(f64::MIN_POSITIVE)).collect();
    let mass = |mu: f64| -> f64 {
        (0..w.len())
            .filter(|&p| w[p] > 0.0)
            .map(|p| w[p] * root(q[p], mu, b[p]))
            .sum()
    };
    // mass is decreasing in mu
    let mut lo = -1.0;
    while mass(lo) < target {
        lo *= 2.0;
    }
    let mut hi = 1.0;
    while mass(hi) > target {
        hi *= 2.0;
    }
    let scale = b.iter().fold(f64::MIN_POSITIVE, |m, &x| m.max(x));
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 1e-17 * scale.max(lo.abs()).max(hi.abs()) {
            break;
        }
        if mass(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mu = 0.5 * (lo + hi);
    let mut out: Vec<f64> = (0..w.len())
        .map(|p| {
            if w[p] > 0.0 {
                w[p] * root(q[p], mu, b[p])
            } else {
                0.0
            }
        })
        .collect();
    let sum: f64 = out.iter().sum();
    if sum > 0.0 {
        out.iter_mut().for_each(|x| *x *= target / sum);
    }
    out
}

/// One full-matrix update of `H` and `lambda`.
pub fn dense_update(
    w: &Array2<f64>,
    fac: &Factorization<f64>,
    form: UpdateForm,
    epsilon: f64,
) -> Result<Factorization<f64>> {
    check(w)?;
    let (n, d) = fac.h.dim();
    let y = reconstruction(fac);
    let k = Array2::from_shape_fn((n, n), |(i, j)| {
        let wij = w[(i, j)];
        if wij > 0.0 {
            let r = wij / y[(i, j)].max(epsilon);
            match form {
                UpdateForm::Ratio => r,
                UpdateForm::LiteralLog => r.ln(),
            }
        } else {
            0.0
        }
    });
    let s = k.dot(&fac.h);
    let c = fac.h.sum_axis(ndarray::Axis(0));
    let g = (&fac.h * &s).sum_axis(ndarray::Axis(0));
    let total = w.sum();
    let lambda = &fac.lambda;

    let mut h = fac.h.clone();
    let mut new_lambda = Array1::zeros(d);
    let has_edges = |i: usize| w.row(i).iter().any(|&x| x > 0.0);
    match (fac.normalization, form) {
        (Normalization::Columns, UpdateForm::Ratio) => {
            for p in 0..d {
                let col: Vec<f64> = (0..n).map(|i| fac.h[(i, p)] * s[(i, p)]).collect();
                let sum: f64 = col.iter().sum();
                if sum > 0.0 {
                    for i in 0..n {
                        h[(i, p)] = col[i] / sum;
                    }
                }
                new_lambda[p] = lambda[p] * sum;
            }
            let sum = new_lambda.sum();
            new_lambda.mapv_inplace(|x| x / sum * total);
        }
        (Normalization::Columns, UpdateForm::LiteralLog) => {
            for p in 0..d {
                let col: Vec<f64> = (0..n)
                    .map(|i| (fac.h[(i, p)] * lambda[p] * s[(i, p)]).max(epsilon))
                    .collect();
                let sum: f64 = col.iter().sum();
                for i in 0..n {
                    h[(i, p)] = col[i] / sum;
                }
                new_lambda[p] = (lambda[p] * g[p]).max(epsilon);
            }
            let sum = new_lambda.sum();
            new_lambda.mapv_inplace(|x| x / sum * total);
        }
        (Normalization::Rows, UpdateForm::Ratio) => {
            let q: Vec<f64> = (0..d).map(|p| lambda[p] * c[p]).collect();
            for i in 0..n {
                if !has_edges(i) {
                    continue;
                }
                let old: Vec<f64> = fac.h.row(i).to_vec();
                let b: Vec<f64> = (0..d).map(|p| lambda[p] * s[(i, p)]).collect();
                let row = solve_constrained(&old, &q, &b, 1.0);
                for p in 0..d {
                    h[(i, p)] = row[p];
                }
            }
            let q: Vec<f64> = c.iter().map(|&x| x * x).collect();
            let l = solve_constrained(lambda.as_slice().unwrap(), &q, g.as_slice().unwrap(), total);
            new_lambda = Array1::from(l);
        }
        (Normalization::Rows, UpdateForm::LiteralLog) => {
            for i in 0..n {
                if !has_edges(i) {
                    continue;
                }
                let mut row: Vec<f64> = (0..d)
                    .map(|p| (fac.h[(i, p)] * lambda[p] * s[(i, p)]).max(epsilon))
                    .collect();
                let sum: f64 = row.iter().sum();
                row.iter_mut().for_each(|x| *x /= sum);
                for p in 0..d {
                    h[(i, p)] = row[p];
                }
            }
            for p in 0..d {
                new_lambda[p] = (lambda[p] * g[p]).max(epsilon);
            }
            let sum = new_lambda.sum();
            new_lambda.mapv_inplace(|x| x / sum * total);
        }
    }
    Factorization::new(h, new_lambda, fac.normalization)
}

/// Full-matrix counterpart of the sparse fitting loop, same initializer,
/// stopping rule and best-iterate selection.
pub fn dense_factorize_oracle(w: &Array2<f64>, config: &FactorizeConfig) -> Result<DenseRun> {
    check(w)?;
    let total = w.sum();
    if !(total > 0.0) {
        return Err(Error::validation("cannot factorize a matrix without edges"));
    }
    let eps = config.epsilon;
    let mut current = init_factorization(w.nrows(), total, config)?;
    let mut obj = dense_objective(w, &current, eps)?;
    let mut best = (obj, current.clone());
    let mut trace = vec![obj];
    let mut iterates = vec![current.clone()];
    let mut converged = false;
    for _ in 0..config.max_iters {
        let next = dense_update(w, &current, config.update_form, eps)?;
        let next_obj = dense_objective(w, &next, eps)?;
        trace.push(next_obj);
        iterates.push(next.clone());
        if next_obj < best.0 {
            best = (next_obj, next.clone());
        }
        let improvement = (obj - next_obj) / obj.abs().max(f64::MIN_POSITIVE);
        current = next;
        obj = next_obj;
        if improvement < config.rel_tol {
            converged = true;
            break;
        }
    }
    Ok(DenseRun {
        best: best.1,
        iterates,
        objective_trace: trace,
        converged,
    })
}
