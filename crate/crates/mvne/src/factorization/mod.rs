//! Graph factorization clustering: `W ~ H diag(lambda) H^T` with
//! non-negative `H` (n x d) and community masses `lambda` summing to the
//! total weight of `W`, fitted by multiplicative updates under the
//! generalized KL divergence
//! `L(X, Y) = sum_ij x_ij ln(x_ij / y_ij) - x_ij + y_ij`.
//!
//! Two normalizations of `H` are supported. With [`Normalization::Columns`]
//! (the default) each column is a distribution over nodes, `h_ip = p(v_i |
//! u_p)`, so the reconstruction carries exactly the mass of `W` and the
//! update is an exact EM step. The node embedding is then the posterior
//! membership `p(u_p | v_i)`, proportional to `h_ip lambda_p`. With
//! [`Normalization::Rows`] each row of `H` is itself a membership
//! distribution and the embedding is `H`; the mass constraint then cannot
//! be met by clustered solutions and fits tend to park most of the mass in
//! one sparsely used community.

mod io;
mod kernel;
mod solve;

use std::fmt;
use std::str::FromStr;

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{NodeId, SparseAdjacency};
use crate::scalar::Scalar;

pub use io::{read_embedding, write_embedding};

/// How the ratio kernel `r_ij = w_ij / (H Lambda H^T)_ij` enters the update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UpdateForm {
    /// Majorize-minimize step on the ratio kernel; the divergence never
    /// increases.
    #[default]
    Ratio,
    /// `h_ip * sum_j ln(r_ij) lambda_p h_jp`, clamped at the numerical floor
    /// and renormalized. No descent guarantee.
    LiteralLog,
}

impl fmt::Display for UpdateForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UpdateForm::Ratio => "ratio",
            UpdateForm::LiteralLog => "literal-log",
        })
    }
}

impl FromStr for UpdateForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ratio" => Ok(UpdateForm::Ratio),
            "literal-log" | "log" => Ok(UpdateForm::LiteralLog),
            other => Err(Error::validation(format!(
                "unknown update form {other:?} (expected ratio or literal-log)"
            ))),
        }
    }
}

/// Which sums of `H` are fixed to one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// `sum_i h_ip = 1` for every community.
    #[default]
    Columns,
    /// `sum_p h_ip = 1` for every node.
    Rows,
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Normalization::Columns => "columns",
            Normalization::Rows => "rows",
        })
    }
}

impl FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "columns" | "cols" => Ok(Normalization::Columns),
            "rows" => Ok(Normalization::Rows),
            other => Err(Error::validation(format!(
                "unknown normalization {other:?} (expected columns or rows)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorizeConfig {
    /// Embedding dimension (number of latent communities).
    pub d: usize,
    pub max_iters: usize,
    /// Stop once the relative objective improvement drops below this.
    pub rel_tol: f64,
    pub seed: u64,
    /// Floor applied to reconstructed entries before division and logs.
    pub epsilon: f64,
    pub update_form: UpdateForm,
    pub normalization: Normalization,
}

impl Default for FactorizeConfig {
    fn default() -> Self {
        Self {
            d: 128,
            max_iters: 500,
            rel_tol: 1e-6,
            seed: 42,
            epsilon: 1e-12,
            update_form: UpdateForm::Ratio,
            normalization: Normalization::Columns,
        }
    }
}

impl FactorizeConfig {
    pub fn with_dim(d: usize) -> Self {
        Self {
            d,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::validation("dimension d must be at least 1"));
        }
        if self.max_iters == 0 {
            return Err(Error::validation("max_iters must be at least 1"));
        }
        if !(self.rel_tol >= 0.0) {
            return Err(Error::validation("rel_tol must be non-negative"));
        }
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(Error::validation("epsilon must be positive"));
        }
        Ok(())
    }
}

/// Community factors and masses.
///
/// Invariants: the columns (or rows, per `normalization`) of `h` sum to 1,
/// `lambda` sums to the total weight of the factorized matrix, all entries
/// are non-negative.
#[derive(Debug, Clone, PartialEq)]
pub struct Factorization<T> {
    pub h: Array2<T>,
    pub lambda: Array1<T>,
    pub normalization: Normalization,
}

impl<T: Scalar> Factorization<T> {
    /// Wraps raw factors, checking shapes and signs (not the sum
    /// constraints, which depend on the matrix being factorized).
    pub fn new(h: Array2<T>, lambda: Array1<T>, normalization: Normalization) -> Result<Self> {
        if h.ncols() != lambda.len() {
            return Err(Error::Dimension(format!(
                "H has {} columns, lambda {} entries",
                h.ncols(),
                lambda.len()
            )));
        }
        if h.iter()
            .chain(lambda.iter())
            .any(|&x| !(x >= T::zero()) || !x.is_finite())
        {
            return Err(Error::validation("factors must be finite and non-negative"));
        }
        Ok(Self {
            h: h.as_standard_layout().into_owned(),
            lambda,
            normalization,
        })
    }

    pub fn n(&self) -> usize {
        self.h.nrows()
    }

    pub fn d(&self) -> usize {
        self.h.ncols()
    }

    /// `(H Lambda H^T)_ij = sum_p h_ip lambda_p h_jp`.
    pub fn reconstruct_entry(&self, i: NodeId, j: NodeId) -> T {
        let (hi, hj) = (self.h.row(i), self.h.row(j));
        (0..self.d())
            .map(|p| self.lambda[p] * (hi[p] * hj[p]))
            .sum()
    }

    /// The node embedding: soft memberships, one row per node, each row
    /// summing to 1. Under row normalization this is a copy of `H`; under
    /// column normalization row `i` is `h_ip lambda_p` rescaled to unit sum,
    /// and nodes without any reconstructed mass get the uniform row.
    pub fn embedding(&self) -> Array2<T> {
        match self.normalization {
            Normalization::Rows => self.h.clone(),
            Normalization::Columns => {
                let d = self.d();
                let mut m = self.mass_scaled();
                for mut row in m.rows_mut() {
                    let sum: T = row.iter().copied().sum();
                    if sum > T::zero() {
                        row.mapv_inplace(|x| x / sum);
                    } else {
                        row.fill(T::one() / T::of_usize(d));
                    }
                }
                m
            }
        }
    }

    /// `H Lambda`, the node-to-community weights.
    pub fn mass_scaled(&self) -> Array2<T> {
        &self.h * &self.lambda
    }
}

/// Positive uniform draws, normalized per `config.normalization`, and
/// uniform masses summing to `total_weight`. Deterministic in `config.seed`.
pub fn init_factorization<T: Scalar>(
    n: usize,
    total_weight: T,
    config: &FactorizeConfig,
) -> Result<Factorization<T>> {
    config.validate()?;
    if n == 0 {
        return Err(Error::validation("cannot factorize a graph with no nodes"));
    }
    if !(total_weight >= T::zero()) || !total_weight.is_finite() {
        return Err(Error::validation(format!(
            "invalid total weight {total_weight}"
        )));
    }
    let d = config.d;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut h = Array2::<T>::zeros((n, d));
    for x in h.iter_mut() {
        *x = T::of(rng.random_range(0.01..1.0));
    }
    match config.normalization {
        Normalization::Rows => {
            for mut row in h.rows_mut() {
                let sum: T = row.iter().copied().sum();
                row.mapv_inplace(|x| x / sum);
            }
        }
        Normalization::Columns => {
            for mut col in h.columns_mut() {
                let sum: T = col.iter().copied().sum();
                col.mapv_inplace(|x| x / sum);
            }
        }
    }
    let lambda = Array1::from_elem(d, total_weight / T::of_usize(d));
    Ok(Factorization {
        h,
        lambda,
        normalization: config.normalization,
    })
}

/// Generalized KL divergence between `w` and the reconstruction, summed over
/// all `n^2` pairs. Zero entries of `w` contribute their reconstruction,
/// accumulated through `sum_ij yhat_ij = sum_p lambda_p (sum_i h_ip)^2`.
pub fn kl_objective<T: Scalar>(
    w: &SparseAdjacency<T>,
    fac: &Factorization<T>,
    epsilon: T,
) -> Result<T> {
    check_shapes(w, fac)?;
    Ok(kernel::sparse_pass(w, fac, UpdateForm::Ratio, epsilon).objective)
}

/// One simultaneous update of `H` and `lambda`.
pub fn update_step<T: Scalar>(
    w: &SparseAdjacency<T>,
    fac: &Factorization<T>,
    config: &FactorizeConfig,
) -> Result<Factorization<T>> {
    check_shapes(w, fac)?;
    check_mode(fac, config)?;
    let eps = T::of(config.epsilon);
    let pass = kernel::sparse_pass(w, fac, config.update_form, eps);
    Ok(apply_pass(w, fac, &pass, config.update_form, eps))
}

fn check_mode<T>(fac: &Factorization<T>, config: &FactorizeConfig) -> Result<()> {
    if fac.normalization != config.normalization {
        return Err(Error::validation(format!(
            "factorization uses {} normalization, config {}",
            fac.normalization, config.normalization
        )));
    }
    Ok(())
}

fn check_shapes<T: Scalar>(w: &SparseAdjacency<T>, fac: &Factorization<T>) -> Result<()> {
    if w.n() != fac.n() {
        return Err(Error::Dimension(format!(
            "matrix has {} nodes, factorization {}",
            w.n(),
            fac.n()
        )));
    }
    Ok(())
}

fn apply_pass<T: Scalar>(
    w: &SparseAdjacency<T>,
    fac: &Factorization<T>,
    pass: &kernel::Pass<T>,
    form: UpdateForm,
    eps: T,
) -> Factorization<T> {
    let d = fac.d();
    let mut next = fac.clone();
    let lambda = fac.lambda.as_slice().expect("contiguous");
    let total = w.total_weight();
    let h_old = fac.h.as_slice().expect("standard layout");
    let h_new = next.h.as_slice_mut().expect("standard layout");
    match (fac.normalization, form) {
        (Normalization::Columns, UpdateForm::Ratio) => {
            // EM: h_ip s_ip is the expected edge mass of node i routed
            // through community p, g_p its column total
            for ((out, old), s_row) in h_new
                .chunks_exact_mut(d)
                .zip(h_old.chunks_exact(d))
                .zip(pass.s.chunks_exact(d))
            {
                for p in 0..d {
                    if pass.g[p] > T::zero() {
                        out[p] = old[p] * s_row[p] / pass.g[p];
                    }
                }
            }
            let out = next.lambda.as_slice_mut().expect("contiguous");
            for p in 0..d {
                out[p] = lambda[p] * pass.g[p];
            }
            rescale(out, total);
        }
        (Normalization::Columns, UpdateForm::LiteralLog) => {
            for ((out, old), s_row) in h_new
                .chunks_exact_mut(d)
                .zip(h_old.chunks_exact(d))
                .zip(pass.s.chunks_exact(d))
            {
                for p in 0..d {
                    out[p] = (old[p] * lambda[p] * s_row[p]).max(eps);
                }
            }
            let mut col = vec![T::zero(); d];
            for row in h_new.chunks_exact(d) {
                for p in 0..d {
                    col[p] += row[p];
                }
            }
            for row in h_new.chunks_exact_mut(d) {
                for p in 0..d {
                    row[p] /= col[p];
                }
            }
            literal_log_masses(
                next.lambda.as_slice_mut().expect("contiguous"),
                lambda,
                &pass.g,
                eps,
                total,
            );
        }
        (Normalization::Rows, UpdateForm::Ratio) => {
            // membership rows: curvature lambda_p c_p, signal lambda_p s_ip
            let q: Vec<T> = lambda
                .iter()
                .zip(&pass.col_sums)
                .map(|(&l, &c)| l * c)
                .collect();
            h_new
                .chunks_exact_mut(d)
                .zip(h_old.chunks_exact(d))
                .zip(pass.s.chunks_exact(d))
                .enumerate()
                .for_each(|(i, ((out, old), s_row))| {
                    if w.degree(i) == 0 {
                        return;
                    }
                    let b: Vec<T> = lambda.iter().zip(s_row).map(|(&l, &s)| l * s).collect();
                    solve::constrained_step(old, &q, &b, T::one(), out);
                });
            // masses: curvature c_p^2, signal g_p
            let q: Vec<T> = pass.col_sums.iter().map(|&c| c * c).collect();
            let out = next.lambda.as_slice_mut().expect("contiguous");
            solve::constrained_step(lambda, &q, &pass.g, total, out);
        }
        (Normalization::Rows, UpdateForm::LiteralLog) => {
            for (i, ((out, old), s_row)) in h_new
                .chunks_exact_mut(d)
                .zip(h_old.chunks_exact(d))
                .zip(pass.s.chunks_exact(d))
                .enumerate()
            {
                if w.degree(i) == 0 {
                    continue;
                }
                for p in 0..d {
                    out[p] = (old[p] * lambda[p] * s_row[p]).max(eps);
                }
                rescale(out, T::one());
            }
            literal_log_masses(
                next.lambda.as_slice_mut().expect("contiguous"),
                lambda,
                &pass.g,
                eps,
                total,
            );
        }
    }
    next
}

fn literal_log_masses<T: Scalar>(out: &mut [T], lambda: &[T], g: &[T], eps: T, total: T) {
    for p in 0..out.len() {
        out[p] = (lambda[p] * g[p]).max(eps);
    }
    rescale(out, total);
}

fn rescale<T: Scalar>(v: &mut [T], target: T) {
    let sum: T = v.iter().copied().sum();
    if sum > T::zero() {
        v.iter_mut().for_each(|x| *x = *x / sum * target);
    }
}

/// Bookkeeping for one factorization run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorizeReport {
    /// Updates performed.
    pub iterations: usize,
    /// Whether the relative-improvement test fired before `max_iters`.
    pub converged: bool,
    /// Objective of the initial iterate followed by one value per update.
    pub objective_trace: Vec<f64>,
    /// Objective of the returned (best) iterate.
    pub final_objective: f64,
    /// Index into `objective_trace` of the returned iterate.
    pub best_iteration: usize,
    /// Zero-degree nodes. They get no update signal: under row
    /// normalization their rows stay at the initialization, under column
    /// normalization their entries decay to zero and their embedding rows
    /// are uniform.
    pub degenerate_nodes: Vec<NodeId>,
}

#[derive(Debug, Clone)]
pub struct Factorized<T> {
    pub factorization: Factorization<T>,
    pub report: FactorizeReport,
}

/// Fits `W ~ H Lambda H^T` from the seeded initialization.
pub fn factorize<T: Scalar>(
    w: &SparseAdjacency<T>,
    config: &FactorizeConfig,
) -> Result<Factorized<T>> {
    config.validate()?;
    if w.nnz() == 0 || !(w.total_weight() > T::zero()) {
        return Err(Error::validation("cannot factorize a matrix without edges"));
    }
    let init = init_factorization(w.n(), w.total_weight(), config)?;
    factorize_from(w, init, config)
}

/// Fits starting from a caller-supplied iterate. Returns the best-objective
/// iterate seen.
pub fn factorize_from<T: Scalar>(
    w: &SparseAdjacency<T>,
    init: Factorization<T>,
    config: &FactorizeConfig,
) -> Result<Factorized<T>> {
    config.validate()?;
    check_shapes(w, &init)?;
    check_mode(&init, config)?;
    if init.d() != config.d {
        return Err(Error::Dimension(format!(
            "initial factorization has d = {}, config d = {}",
            init.d(),
            config.d
        )));
    }
    if w.nnz() == 0 || !(w.total_weight() > T::zero()) {
        return Err(Error::validation("cannot factorize a matrix without edges"));
    }
    let eps = T::of(config.epsilon);
    let degenerate_nodes: Vec<NodeId> = (0..w.n()).filter(|&i| w.degree(i) == 0).collect();

    let mut current = init;
    let mut pass = kernel::sparse_pass(w, &current, config.update_form, eps);
    let mut trace = vec![pass.objective.as_f64()];
    let mut best = (pass.objective, 0usize, current.clone());
    let mut iterations = 0;
    let mut converged = false;
    while iterations < config.max_iters {
        let next = apply_pass(w, &current, &pass, config.update_form, eps);
        let next_pass = kernel::sparse_pass(w, &next, config.update_form, eps);
        iterations += 1;
        let (prev_obj, obj) = (pass.objective.as_f64(), next_pass.objective.as_f64());
        trace.push(obj);
        if next_pass.objective < best.0 {
            best = (next_pass.objective, iterations, next.clone());
        }
        current = next;
        pass = next_pass;
        let improvement = (prev_obj - obj) / prev_obj.abs().max(f64::MIN_POSITIVE);
        if improvement < config.rel_tol {
            converged = true;
            break;
        }
    }
    if !degenerate_nodes.is_empty() {
        log::warn!(
            "{} zero-degree node(s) carry no information in the embedding",
            degenerate_nodes.len()
        );
    }
    let (best_obj, best_iteration, factorization) = best;
    Ok(Factorized {
        factorization,
        report: FactorizeReport {
            iterations,
            converged,
            objective_trace: trace,
            final_objective: best_obj.as_f64(),
            best_iteration,
            degenerate_nodes,
        },
    })
}
