use approx::assert_relative_eq;
use ndarray::{Array1, Array2, Axis};
use proptest::prelude::*;

use mvne::testkit::{dense_factorize_oracle, dense_objective, dense_update, erdos_renyi};
use mvne::{
    factorize, factorize_from, init_factorization, kl_objective, update_step, Adjacency,
    Factorization, FactorizeConfig, Normalization,
};

const MODES: [Normalization; 2] = [Normalization::Columns, Normalization::Rows];

fn config(d: usize, seed: u64, normalization: Normalization) -> FactorizeConfig {
    FactorizeConfig {
        d,
        seed,
        normalization,
        rel_tol: 0.0,
        ..FactorizeConfig::default()
    }
}

/// Random graph with at least one edge and random positive weights.
fn weighted_graph(n: usize, density: f64, seed: u64) -> Adjacency {
    let mut s = seed;
    loop {
        let g = erdos_renyi(n, density, s).unwrap();
        if g.nnz() > 0 {
            let edges: Vec<_> = g
                .entries()
                .filter(|&(i, j, _)| i < j)
                .enumerate()
                .map(|(k, (i, j, _))| (i, j, 0.5 + ((k * 7 + s as usize) % 5) as f64))
                .collect();
            return Adjacency::from_undirected_edges(n, edges).unwrap();
        }
        s += 1000;
    }
}

fn max_abs_diff(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn max_abs_diff1(a: &Array1<f64>, b: &Array1<f64>) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[test]
fn sparse_objective_matches_dense_sum() {
    for seed in 0..5 {
        let w = weighted_graph(10, 0.3, seed);
        let dense = w.to_dense();
        for mode in MODES {
            let fac = init_factorization(10, w.total_weight(), &config(3, seed, mode)).unwrap();
            let sparse = kl_objective(&w, &fac, 1e-12).unwrap();
            let oracle = dense_objective(&dense, &fac, 1e-12).unwrap();
            assert_relative_eq!(sparse, oracle, max_relative = 1e-10);
        }
    }
}

#[test]
fn sparse_trajectory_matches_dense_oracle() {
    for seed in 0..5 {
        let w = weighted_graph(15, 0.3, seed);
        let dense = w.to_dense();
        for mode in MODES {
            let cfg = config(4, seed, mode);
            let mut sparse = init_factorization(15, w.total_weight(), &cfg).unwrap();
            let mut oracle = sparse.clone();
            for it in 0..50 {
                sparse = update_step(&w, &sparse, &cfg).unwrap();
                oracle = dense_update(&dense, &oracle, cfg.update_form, cfg.epsilon).unwrap();
                let dh = max_abs_diff(&sparse.h, &oracle.h);
                let dl = max_abs_diff1(&sparse.lambda, &oracle.lambda);
                assert!(
                    dh <= 1e-10 && dl <= 1e-10,
                    "{mode} seed {seed} iter {it}: {dh:e} {dl:e}"
                );
            }
        }
    }
}

#[test]
fn fitted_runs_agree_with_dense_oracle() {
    let w = weighted_graph(12, 0.4, 3);
    for mode in MODES {
        let cfg = FactorizeConfig {
            max_iters: 40,
            rel_tol: 1e-9,
            ..config(3, 11, mode)
        };
        let sparse = factorize(&w, &cfg).unwrap();
        let run = dense_factorize_oracle(&w.to_dense(), &cfg).unwrap();
        assert_eq!(
            sparse.report.objective_trace.len(),
            run.objective_trace.len()
        );
        for (a, b) in sparse
            .report
            .objective_trace
            .iter()
            .zip(&run.objective_trace)
        {
            assert_relative_eq!(a, b, max_relative = 1e-10);
        }
        assert!(max_abs_diff(&sparse.factorization.h, &run.best.h) <= 1e-10);
    }
}

#[test]
fn dense_oracle_is_monotone() {
    for seed in 0..10 {
        let w = weighted_graph(12, 0.35, 100 + seed);
        for mode in MODES {
            let cfg = FactorizeConfig {
                max_iters: 100,
                ..config(3, seed, mode)
            };
            let run = dense_factorize_oracle(&w.to_dense(), &cfg).unwrap();
            for pair in run.objective_trace.windows(2) {
                assert!(pair[1] <= pair[0] + 1e-9, "{mode} seed {seed}");
            }
        }
    }
}

#[test]
fn scaling_weights_scales_masses_only() {
    let w = weighted_graph(14, 0.3, 8);
    let scaled = w.scaled(4.0).unwrap();
    for mode in MODES {
        let cfg = FactorizeConfig {
            max_iters: 60,
            ..config(3, 2, mode)
        };
        let a = factorize(&w, &cfg).unwrap().factorization;
        let b = factorize(&scaled, &cfg).unwrap().factorization;
        assert!(max_abs_diff(&a.h, &b.h) <= 1e-9, "{mode}");
        assert!(
            max_abs_diff1(&(&a.lambda * 4.0), &b.lambda) <= 1e-8,
            "{mode}"
        );
    }
}

#[test]
fn permuting_nodes_permutes_rows() {
    let n = 13;
    let w = weighted_graph(n, 0.35, 21);
    let perm: Vec<usize> = (0..n).map(|i| (i * 5 + 3) % n).collect();
    let edges: Vec<_> = w
        .entries()
        .filter(|&(i, j, _)| i <= j)
        .map(|(i, j, x)| (perm[i], perm[j], x))
        .collect();
    let wp = Adjacency::from_undirected_edges(n, edges).unwrap();
    for mode in MODES {
        let cfg = FactorizeConfig {
            max_iters: 80,
            ..config(3, 4, mode)
        };
        let init = init_factorization(n, w.total_weight(), &cfg).unwrap();
        let mut hp = Array2::zeros(init.h.dim());
        for (i, &pi) in perm.iter().enumerate() {
            hp.row_mut(pi).assign(&init.h.row(i));
        }
        let init_p = Factorization::new(hp, init.lambda.clone(), mode).unwrap();
        let a = factorize_from(&w, init, &cfg).unwrap().factorization;
        let b = factorize_from(&wp, init_p, &cfg).unwrap().factorization;
        for (i, &pi) in perm.iter().enumerate() {
            for p in 0..3 {
                assert!((a.h[(i, p)] - b.h[(pi, p)]).abs() <= 1e-12, "{mode}");
            }
        }
        assert!(max_abs_diff1(&a.lambda, &b.lambda) <= 1e-10);
    }
}

#[test]
fn embedding_rows_are_memberships() {
    let w = weighted_graph(20, 0.3, 5);
    for mode in MODES {
        let out = factorize(&w, &config(4, 1, mode)).unwrap();
        let e = out.factorization.embedding();
        assert_eq!(e.dim(), (20, 4));
        for s in e.sum_axis(Axis(1)) {
            assert!((s - 1.0).abs() <= 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn updates_descend_and_keep_constraints(
        n in 5usize..20,
        density in 0.1f64..0.5,
        d in 1usize..5,
        seed in 0u64..1_000,
        rows in any::<bool>(),
    ) {
        let mode = if rows { Normalization::Rows } else { Normalization::Columns };
        let w = weighted_graph(n, density, seed);
        let cfg = config(d, seed, mode);
        let mut fac = init_factorization(n, w.total_weight(), &cfg).unwrap();
        let mut obj = kl_objective(&w, &fac, cfg.epsilon).unwrap();
        for _ in 0..40 {
            fac = update_step(&w, &fac, &cfg).unwrap();
            let next = kl_objective(&w, &fac, cfg.epsilon).unwrap();
            prop_assert!(next <= obj + 1e-9, "{} -> {}", obj, next);
            obj = next;
            let axis = if rows { Axis(1) } else { Axis(0) };
            for (k, s) in fac.h.sum_axis(axis).iter().enumerate() {
                // rows mode leaves isolated rows alone; they stay normalized
                prop_assert!((s - 1.0).abs() <= 1e-9, "sum {} at {}", s, k);
            }
            prop_assert!((fac.lambda.sum() - w.total_weight()).abs() <= 1e-6 * w.total_weight());
            prop_assert!(fac.h.iter().chain(fac.lambda.iter()).all(|&x| x >= 0.0));
        }
    }
}
