//! One sparse pass over the stored entries of `W`: the ratio statistics the
//! update needs and the divergence of the current iterate, in
//! `O(nnz * d + n * d)`.

use rayon::prelude::*;

use super::{Factorization, UpdateForm};
use crate::graph::SparseAdjacency;
use crate::scalar::Scalar;

/// Rows per rayon task; results do not depend on it.
const ROW_CHUNK: usize = 64;

pub(crate) struct Pass<T> {
    /// n x d, row-major: `s_ip = sum_j k(r_ij) h_jp` over stored `j`, where
    /// `k` is the identity (ratio form) or `ln` (literal-log form).
    pub s: Vec<T>,
    /// `c_p = sum_i h_ip`.
    pub col_sums: Vec<T>,
    /// `g_p = sum_i h_ip s_ip`.
    pub g: Vec<T>,
    /// Generalized KL divergence of the iterate the pass was run on.
    pub objective: T,
}

pub(crate) fn sparse_pass<T: Scalar>(
    w: &SparseAdjacency<T>,
    fac: &Factorization<T>,
    form: UpdateForm,
    epsilon: T,
) -> Pass<T> {
    let n = fac.n();
    let d = fac.d();
    let h = fac.h.as_slice().expect("H is kept in standard layout");
    let lambda = fac.lambda.as_slice().expect("lambda is contiguous");
    // h_i * lambda, so that yhat_ij is a plain dot product with h_j
    let hl: Vec<T> = h
        .chunks_exact(d)
        .flat_map(|row| row.iter().zip(lambda).map(|(&a, &l)| a * l))
        .collect();

    let mut s = vec![T::zero(); n * d];
    let mut row_terms = vec![T::zero(); n];
    s.par_chunks_mut(d)
        .zip(row_terms.par_iter_mut())
        .enumerate()
        .with_min_len(ROW_CHUNK)
        .for_each(|(i, (s_row, term))| {
            let (cols, vals) = w.row(i);
            let hl_i = &hl[i * d..(i + 1) * d];
            let mut acc = T::zero();
            for (&j, &wij) in cols.iter().zip(vals) {
                let h_j = &h[j * d..(j + 1) * d];
                let yhat: T = hl_i.iter().zip(h_j).map(|(&a, &b)| a * b).sum();
                let yhat = yhat.max(epsilon);
                let ratio = wij / yhat;
                acc += wij * ratio.ln() - wij;
                let k = match form {
                    UpdateForm::Ratio => ratio,
                    UpdateForm::LiteralLog => ratio.ln(),
                };
                for (sp, &hp) in s_row.iter_mut().zip(h_j) {
                    *sp += k * hp;
                }
            }
            *term = acc;
        });

    let mut col_sums = vec![T::zero(); d];
    let mut g = vec![T::zero(); d];
    for (h_row, s_row) in h.chunks_exact(d).zip(s.chunks_exact(d)) {
        for p in 0..d {
            col_sums[p] += h_row[p];
            g[p] += h_row[p] * s_row[p];
        }
    }
    let mass: T = lambda.iter().zip(&col_sums).map(|(&l, &c)| l * c * c).sum();
    let objective = row_terms.iter().copied().sum::<T>() + mass;
    Pass {
        s,
        col_sums,
        g,
        objective,
    }
}
