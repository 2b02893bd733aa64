use std::collections::BTreeSet;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SparseAdjacency;
use crate::graph::{write_edge_list, write_labels, LabelStore, MultiViewGraph, NodeRegistry};

/// Per-view degradation of the base graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViewNoise {
    /// Probability that a base edge survives into the view.
    pub keep: f64,
    /// Expected noise edges as a fraction of the base edge count.
    pub noise: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SbmSpec {
    pub n: usize,
    pub communities: usize,
    pub p_in: f64,
    pub p_out: f64,
    pub views: Vec<ViewNoise>,
    pub seed: u64,
}

impl SbmSpec {
    /// `views` copies of the same degradation.
    pub fn uniform(
        n: usize,
        communities: usize,
        p_in: f64,
        p_out: f64,
        views: usize,
        noise: ViewNoise,
        seed: u64,
    ) -> Self {
        Self {
            n,
            communities,
            p_in,
            p_out,
            views: vec![noise; views],
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if self.n < 2 {
            return Err(Error::validation("need at least 2 nodes"));
        }
        if self.communities == 0 || self.communities > self.n {
            return Err(Error::validation(format!(
                "community count {} not in [1, {}]",
                self.communities, self.n
            )));
        }
        if !(unit(self.p_in) && unit(self.p_out) && self.p_out < self.p_in) {
            return Err(Error::validation(format!(
                "need 0 <= p_out < p_in <= 1, got p_in {} p_out {}",
                self.p_in, self.p_out
            )));
        }
        if self.views.is_empty() {
            return Err(Error::validation("need at least one view"));
        }
        for (v, view) in self.views.iter().enumerate() {
            if !(unit(view.keep) && unit(view.noise)) {
                return Err(Error::validation(format!(
                    "view {v}: keep {} and noise {} must lie in [0, 1]",
                    view.keep, view.noise
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViewInfo {
    pub kept: usize,
    pub noise: usize,
}

impl ViewInfo {
    pub fn edges(&self) -> usize {
        self.kept + self.noise
    }
}

/// Generator bookkeeping.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SbmInfo {
    pub base_edges: usize,
    pub views: Vec<ViewInfo>,
    pub community_sizes: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct SbmDataset {
    pub graph: MultiViewGraph<f64>,
    pub labels: LabelStore,
    pub communities: Vec<usize>,
    pub info: SbmInfo,
}

fn pair_index(i: usize, j: usize) -> (usize, usize) {
    if i < j {
        (i, j)
    } else {
        (j, i)
    }
}

/// Plants a uniform random partition, samples one base graph and derives
/// each view from it. Node `i` is named `n{i}`, view `v` is `view{v}` and
/// community `c` is the label `c{c}`.
pub fn generate_multiview_sbm(spec: &SbmSpec) -> Result<SbmDataset> {
    spec.validate()?;
    let n = spec.n;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let communities: Vec<usize> = (0..n)
        .map(|_| rng.random_range(0..spec.communities))
        .collect();
    let mut community_sizes = vec![0; spec.communities];
    for &c in &communities {
        community_sizes[c] += 1;
    }

    let mut base = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let p = if communities[i] == communities[j] {
                spec.p_in
            } else {
                spec.p_out
            };
            if rng.random_bool(p) {
                base.push((i, j));
            }
        }
    }
    let base_set: BTreeSet<(usize, usize)> = base.iter().copied().collect();
    let absent = n * (n - 1) / 2 - base.len();

    let registry = NodeRegistry::from_ids((0..n).map(|i| format!("n{i}")));
    let mut views = Vec::with_capacity(spec.views.len());
    let mut infos = Vec::with_capacity(spec.views.len());
    for (v, view) in spec.views.iter().enumerate() {
        let mut edges: Vec<(usize, usize)> = base
            .iter()
            .copied()
            .filter(|_| rng.random_bool(view.keep))
            .collect();
        let kept = edges.len();
        let wanted = (0..base.len())
            .filter(|_| rng.random_bool(view.noise))
            .count();
        let noise = wanted.min(absent);
        let mut added = BTreeSet::new();
        while added.len() < noise {
            let i = rng.random_range(0..n);
            let j = rng.random_range(0..n);
            if i == j {
                continue;
            }
            let e = pair_index(i, j);
            if !base_set.contains(&e) && added.insert(e) {
                edges.push(e);
            }
        }
        let adj =
            SparseAdjacency::from_undirected_edges(n, edges.into_iter().map(|(i, j)| (i, j, 1.0)))?;
        views.push((format!("view{v}"), adj));
        infos.push(ViewInfo { kept, noise });
    }

    let mut labels = LabelStore::new(n);
    for (i, &c) in communities.iter().enumerate() {
        labels.insert(i, &format!("c{c}"))?;
    }
    Ok(SbmDataset {
        graph: MultiViewGraph::from_views(registry, views)?,
        labels,
        communities,
        info: SbmInfo {
            base_edges: base.len(),
            views: infos,
            community_sizes,
        },
    })
}

impl SbmDataset {
    /// Writes `manifest.tsv`, one `<view>.edges` file per view and
    /// `labels.tsv` into `dir`, creating it if needed.
    pub fn write_dataset(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let registry = self.graph.registry();
        let mut manifest = BufWriter::new(File::create(dir.join("manifest.tsv"))?);
        for view in self.graph.views() {
            let file = format!("{}.edges", view.name);
            writeln!(manifest, "{}\t{}", view.name, file)?;
            let out = BufWriter::new(File::create(dir.join(&file))?);
            write_edge_list(&view.adjacency, registry, out)?;
        }
        manifest.flush()?;
        let mut out = BufWriter::new(File::create(dir.join("labels.tsv"))?);
        write_labels(&self.labels, registry, &mut out)?;
        out.flush()?;
        Ok(())
    }
}

/// `G(n, p)` without self-loops, unit weights.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Result<SparseAdjacency<f64>> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::validation(format!(
            "edge probability {p} not in [0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p) {
                edges.push((i, j, 1.0));
            }
        }
    }
    SparseAdjacency::from_undirected_edges(n, edges)
}

/// Exactly `m` distinct unit-weight edges between uniformly chosen pairs.
pub fn random_graph(n: usize, m: usize, seed: u64) -> Result<SparseAdjacency<f64>> {
    let pairs = n * n.saturating_sub(1) / 2;
    if m > pairs {
        return Err(Error::validation(format!(
            "{m} edges do not fit in {n} nodes"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = BTreeSet::new();
    let mut edges = Vec::with_capacity(m);
    while edges.len() < m {
        let i = rng.random_range(0..n);
        let j = rng.random_range(0..n);
        if i != j && seen.insert(pair_index(i, j)) {
            edges.push((i, j, 1.0));
        }
    }
    SparseAdjacency::from_undirected_edges(n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(keep: f64, noise: f64, views: usize, seed: u64) -> SbmSpec {
        SbmSpec::uniform(60, 3, 0.3, 0.02, views, ViewNoise { keep, noise }, seed)
    }

    #[test]
    fn deterministic_per_seed() {
        let a = generate_multiview_sbm(&spec(0.5, 0.1, 2, 3)).unwrap();
        let b = generate_multiview_sbm(&spec(0.5, 0.1, 2, 3)).unwrap();
        assert_eq!(a.info, b.info);
        assert_eq!(a.communities, b.communities);
        for (x, y) in a.graph.views().iter().zip(b.graph.views()) {
            assert_eq!(x.adjacency, y.adjacency);
        }
        let c = generate_multiview_sbm(&spec(0.5, 0.1, 2, 4)).unwrap();
        assert_ne!(a.communities, c.communities);
    }

    #[test]
    fn bookkeeping_matches_graph() {
        let d = generate_multiview_sbm(&spec(0.6, 0.3, 3, 1)).unwrap();
        assert_eq!(d.info.community_sizes.iter().sum::<usize>(), 60);
        for (view, info) in d.graph.views().iter().zip(&d.info.views) {
            assert_eq!(view.adjacency.edge_count(), info.edges());
            assert_eq!(view.adjacency.self_loop_count(), 0);
            view.adjacency.validate().unwrap();
        }
        for i in 0..60 {
            let l = d.labels.labels_of(i);
            assert_eq!(l.len(), 1);
            let name = d.labels.label_name(*l.iter().next().unwrap());
            assert_eq!(name, format!("c{}", d.communities[i]));
        }
    }

    #[test]
    fn full_keep_no_noise_views_identical() {
        let d = generate_multiview_sbm(&spec(1.0, 0.0, 3, 8)).unwrap();
        let v = d.graph.views();
        assert_eq!(v[0].adjacency, v[1].adjacency);
        assert_eq!(v[1].adjacency, v[2].adjacency);
        assert_eq!(d.info.views[0].kept, d.info.base_edges);
    }

    #[test]
    fn empty_view() {
        let d = generate_multiview_sbm(&spec(0.0, 0.0, 1, 8)).unwrap();
        assert_eq!(d.graph.views()[0].adjacency.nnz(), 0);
    }

    #[test]
    fn rejects_bad_specs() {
        let mut s = spec(0.5, 0.1, 1, 0);
        s.p_out = 0.5;
        s.p_in = 0.4;
        assert!(generate_multiview_sbm(&s).is_err());
        let s = spec(1.5, 0.1, 1, 0);
        assert!(generate_multiview_sbm(&s).is_err());
        let mut s = spec(0.5, 0.1, 1, 0);
        s.communities = 0;
        assert!(generate_multiview_sbm(&s).is_err());
    }

    #[test]
    fn random_graph_edge_count() {
        let g = random_graph(30, 100, 5).unwrap();
        assert_eq!(g.edge_count(), 100);
        assert!(random_graph(3, 4, 0).is_err());
    }

    #[test]
    fn writes_dataset_files() {
        let d = generate_multiview_sbm(&spec(0.5, 0.1, 2, 3)).unwrap();
        let dir = std::env::temp_dir().join(format!("mvne-sbm-{}", std::process::id()));
        d.write_dataset(&dir).unwrap();
        let back: MultiViewGraph<f64> =
            crate::graph::load_manifest(&dir.join("manifest.tsv"), false).unwrap();
        assert_eq!(back.view_count(), 2);
        for (x, y) in back.views().iter().zip(d.graph.views()) {
            assert_eq!(x.adjacency.edge_count(), y.adjacency.edge_count());
        }
        fs::remove_dir_all(&dir).unwrap();
    }
}
