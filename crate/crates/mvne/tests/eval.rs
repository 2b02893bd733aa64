use std::collections::BTreeSet;

use ndarray::Array2;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mvne::eval::{macro_f1, micro_f1, run_protocol, EvalProtocol};
use mvne::testkit::{generate_multiview_sbm, SbmDataset, SbmSpec, ViewNoise};
use mvne::{factorize, FactorizeConfig};

fn sbm(seed: u64) -> SbmDataset {
    let spec = SbmSpec::uniform(
        200,
        4,
        0.3,
        0.01,
        1,
        ViewNoise {
            keep: 1.0,
            noise: 0.0,
        },
        seed,
    );
    generate_multiview_sbm(&spec).unwrap()
}

fn embed(data: &SbmDataset, seed: u64) -> Array2<f64> {
    let cfg = FactorizeConfig {
        d: 8,
        seed,
        ..FactorizeConfig::default()
    };
    factorize(&data.graph.views()[0].adjacency, &cfg)
        .unwrap()
        .factorization
        .embedding()
}

#[test]
fn structure_beats_shuffled_labels_and_more_training_helps() {
    let seeds = 0..10u64;
    let (mut structured, mut shuffled, mut low, mut high) = (0.0, 0.0, 0.0, 0.0);
    for seed in seeds.clone() {
        let data = sbm(seed);
        let x = embed(&data, seed);
        let protocol = EvalProtocol {
            fractions: vec![0.1, 0.5, 0.9],
            repeats: 5,
            seed,
            ..EvalProtocol::default()
        };
        let report = run_protocol(x.view(), &data.labels, &protocol).unwrap();
        low += report.results[0].mean_micro;
        structured += report.results[1].mean_micro;
        high += report.results[2].mean_micro;

        let mut perm: Vec<usize> = (0..200).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed + 99));
        let null = run_protocol(x.view(), &data.labels.permuted(&perm), &protocol).unwrap();
        shuffled += null.results[1].mean_micro;
    }
    let k = seeds.count() as f64;
    let (structured, shuffled, low, high) = (structured / k, shuffled / k, low / k, high / k);
    assert!(
        structured - shuffled >= 0.2,
        "structured {structured} shuffled {shuffled}"
    );
    // roughly the frequency of the majority community
    assert!(shuffled < 0.4, "shuffled {shuffled}");
    assert!(high >= low, "0.9 -> {high}, 0.1 -> {low}");
}

#[test]
fn reports_are_deterministic_and_consistent() {
    let data = sbm(3);
    let x = embed(&data, 3);
    let protocol = EvalProtocol {
        fractions: vec![0.2, 0.6],
        repeats: 4,
        ..EvalProtocol::default()
    };
    let a = run_protocol(x.view(), &data.labels, &protocol).unwrap();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let b = pool.install(|| run_protocol(x.view(), &data.labels, &protocol).unwrap());
    assert_eq!(a, b);
    for f in &a.results {
        assert_eq!(f.micro_f1.len(), 4);
        let mean = f.macro_f1.iter().sum::<f64>() / 4.0;
        assert!((mean - f.mean_macro).abs() <= 1e-12);
        assert!(f
            .micro_f1
            .iter()
            .chain(&f.macro_f1)
            .all(|s| (0.0..=1.0).contains(s)));
    }
}

fn label_sets(max_label: usize) -> impl Strategy<Value = Vec<BTreeSet<usize>>> {
    prop::collection::vec(prop::collection::btree_set(0..max_label, 0..3), 1..20)
}

proptest! {
    #[test]
    fn scores_in_unit_interval((truth, pred) in label_sets(6).prop_flat_map(|t| {
        let n = t.len();
        (Just(t), prop::collection::vec(prop::collection::btree_set(0usize..6, 0..3), n))
    })) {
        let mi = micro_f1(&truth, &pred).unwrap();
        let ma = macro_f1(&truth, &pred).unwrap();
        prop_assert!((0.0..=1.0).contains(&mi));
        prop_assert!((0.0..=1.0).contains(&ma));
    }

    #[test]
    fn micro_ignores_label_ids_macro_ignores_node_order(
        (truth, pred) in label_sets(6).prop_flat_map(|t| {
            let n = t.len();
            (Just(t), prop::collection::vec(prop::collection::btree_set(0usize..6, 0..3), n))
        }),
        shift in 1usize..6,
        seed in any::<u64>(),
    ) {
        let relabel = |sets: &[BTreeSet<usize>]| -> Vec<BTreeSet<usize>> {
            sets.iter().map(|s| s.iter().map(|l| (l + shift) % 6).collect()).collect()
        };
        let mi = micro_f1(&truth, &pred).unwrap();
        prop_assert_eq!(mi, micro_f1(&relabel(&truth), &relabel(&pred)).unwrap());

        let mut order: Vec<usize> = (0..truth.len()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let t2: Vec<_> = order.iter().map(|&i| truth[i].clone()).collect();
        let p2: Vec<_> = order.iter().map(|&i| pred[i].clone()).collect();
        prop_assert_eq!(macro_f1(&truth, &pred).unwrap(), macro_f1(&t2, &p2).unwrap());
    }
}
