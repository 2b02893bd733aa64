use std::collections::BTreeSet;
use std::io::Cursor;

use ndarray::Array2;
use proptest::prelude::*;

use mvne::factorization::{read_embedding, write_embedding};
use mvne::graph::{
    load_edge_list, load_labels, load_manifest, view_stats, write_edge_list, write_labels,
};
use mvne::testkit::{generate_multiview_sbm, SbmSpec, ViewNoise};
use mvne::{Adjacency, LabelStore, NodeRegistry};

fn registry(n: usize) -> NodeRegistry {
    NodeRegistry::from_ids((0..n).map(|i| format!("node-{i}")))
}

proptest! {
    #[test]
    fn edge_list_round_trip(
        edges in prop::collection::vec((0usize..12, 0usize..12, 1e-6f64..1e6), 1..40),
    ) {
        let reg = registry(12);
        let w = Adjacency::from_undirected_edges(12, edges).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&w, &reg, &mut buf).unwrap();
        let mut reg2 = reg.clone();
        let back: Adjacency = load_edge_list(Cursor::new(buf), true, &mut reg2).unwrap();
        prop_assert_eq!(reg2.len(), 12);
        prop_assert_eq!(back, w);
    }

    #[test]
    fn embedding_round_trip(values in prop::collection::vec(-1e3f64..1e3, 15)) {
        let reg = registry(5);
        let x = Array2::from_shape_vec((5, 3), values).unwrap();
        let mut buf = Vec::new();
        write_embedding(x.view(), &reg, &mut buf).unwrap();
        let (reg2, y) = read_embedding::<f64, _>(Cursor::new(buf)).unwrap();
        prop_assert_eq!(reg2.iter().collect::<Vec<_>>(), reg.iter().collect::<Vec<_>>());
        prop_assert_eq!(y, x);
    }

    #[test]
    fn label_round_trip(sets in prop::collection::vec(prop::collection::btree_set(0usize..5, 0..3), 8)) {
        let reg = registry(8);
        let mut store = LabelStore::new(8);
        for (i, s) in sets.iter().enumerate() {
            for l in s {
                store.insert(i, &format!("L{l}")).unwrap();
            }
        }
        let mut buf = Vec::new();
        write_labels(&store, &reg, &mut buf).unwrap();
        let back = load_labels(Cursor::new(buf), &reg).unwrap();
        for i in 0..8 {
            let a: BTreeSet<&str> = store.labels_of(i).iter().map(|&l| store.label_name(l)).collect();
            let b: BTreeSet<&str> = back.labels_of(i).iter().map(|&l| back.label_name(l)).collect();
            prop_assert_eq!(a, b);
        }
    }
}

#[test]
fn stats_match_generator_bookkeeping() {
    let spec = SbmSpec::uniform(
        120,
        3,
        0.25,
        0.02,
        5,
        ViewNoise {
            keep: 0.5,
            noise: 0.2,
        },
        9,
    );
    let data = generate_multiview_sbm(&spec).unwrap();
    let stats = view_stats(&data.graph);
    assert_eq!(stats.len(), 5);
    for (s, info) in stats.iter().zip(&data.info.views) {
        assert_eq!(s.edges, info.edges());
        assert_eq!(s.self_loops, 0);
        assert_eq!(s.total_weight, 2.0 * info.edges() as f64);
    }
}

#[test]
fn dataset_files_reload_identically() {
    let spec = SbmSpec::uniform(
        50,
        2,
        0.3,
        0.05,
        3,
        ViewNoise {
            keep: 0.7,
            noise: 0.1,
        },
        2,
    );
    let data = generate_multiview_sbm(&spec).unwrap();
    let dir = tempdir();
    data.write_dataset(&dir).unwrap();
    let back = load_manifest::<f64>(&dir.join("manifest.tsv"), false).unwrap();
    let labels = load_labels(
        std::io::BufReader::new(std::fs::File::open(dir.join("labels.tsv")).unwrap()),
        back.registry(),
    )
    .unwrap();
    // isolated nodes only appear through the label file, so compare by name
    for (v, view) in back.views().iter().enumerate() {
        let orig = &data.graph.views()[v].adjacency;
        assert_eq!(view.adjacency.edge_count(), orig.edge_count());
        for (i, j, w) in view.adjacency.entries() {
            let oi = data.graph.registry().get(back.registry().name(i)).unwrap();
            let oj = data.graph.registry().get(back.registry().name(j)).unwrap();
            assert_eq!(orig.get(oi, oj), Some(w));
        }
    }
    assert_eq!(labels.labeled_nodes().len(), 50);
    std::fs::remove_dir_all(&dir).unwrap();
}

fn tempdir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!(
        "mvne-io-{}-{:?}",
        std::process::id(),
        std::thread::current().id()
    ));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
