use std::path::PathBuf;
use std::time::Instant;

use clap::{ArgAction, Args};
use mvne::factorization::write_embedding;
use mvne::graph::write_edge_list;
use mvne::multiview::BetaMode;
use mvne::{mvne_embed, FactorizeConfig, MvneConfig, Normalization, UpdateForm};
use serde::Serialize;

use crate::failure::CmdResult;
use crate::input::{InputArgs, Source};
use crate::io::{sibling, write_json, write_with};

#[derive(Debug, Clone, Args)]
#[command(args_override_self = true)]
pub struct EmbedArgs {
    #[command(flatten)]
    pub input: InputArgs,

    /// Embedding dimension (latent communities).
    #[arg(short = 'd', long = "dim", default_value_t = 128)]
    pub dim: usize,

    #[arg(long, default_value_t = 500)]
    pub max_iters: usize,

    /// Relative objective improvement below which iteration stops.
    #[arg(long, default_value_t = 1e-6)]
    pub rel_tol: f64,

    #[arg(long, default_value_t = 42)]
    pub seed: u64,

    /// Floor on reconstructed entries.
    #[arg(long, default_value_t = 1e-12)]
    pub epsilon: f64,

    /// `ratio` (monotone) or `literal-log`.
    #[arg(long, default_value_t = UpdateForm::Ratio)]
    pub update_form: UpdateForm,

    /// `columns` (default) or `rows`; see the README.
    #[arg(long, default_value_t = Normalization::Columns)]
    pub normalization: Normalization,

    /// Comma-separated view weights, renormalized to sum 1. Defaults to
    /// shares of active nodes per view.
    #[arg(long, value_delimiter = ',')]
    pub betas: Option<Vec<f64>>,

    /// Scale each view to unit total weight before combining.
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    pub normalize_views: bool,

    /// Embedding file to write.
    #[arg(short, long)]
    pub output: PathBuf,

    /// Run metadata (JSON). Defaults to `<output>.meta.json`.
    #[arg(long)]
    pub metadata: Option<PathBuf>,

    /// Also write the combined matrix that was factorized, as an edge list.
    #[arg(long)]
    pub combined: Option<PathBuf>,
}

impl EmbedArgs {
    pub fn mvne_config(&self) -> MvneConfig {
        MvneConfig {
            factorize: FactorizeConfig {
                d: self.dim,
                max_iters: self.max_iters,
                rel_tol: self.rel_tol,
                seed: self.seed,
                epsilon: self.epsilon,
                update_form: self.update_form,
                normalization: self.normalization,
            },
            beta_mode: match &self.betas {
                Some(b) => BetaMode::Explicit(b.clone()),
                None => BetaMode::DefaultBySize,
            },
            normalize_views: self.normalize_views,
        }
    }
}

#[derive(Debug, Serialize)]
struct ViewMeta {
    name: String,
    path: PathBuf,
    active_nodes: usize,
    edges: usize,
    beta: f64,
}

#[derive(Debug, Serialize)]
struct EmbedMetadata {
    version: &'static str,
    nodes: usize,
    views: Vec<ViewMeta>,
    config: MvneConfig,
    betas: Vec<f64>,
    iterations: usize,
    converged: bool,
    best_iteration: usize,
    final_objective: f64,
    objective_trace: Vec<f64>,
    /// Nodes with no edges in the combined matrix.
    flagged_nodes: Vec<String>,
    wall_time_secs: f64,
}

pub fn run(args: &EmbedArgs) -> CmdResult {
    let (graph, sources) = args.input.load()?;
    let config = args.mvne_config();
    log::info!(
        "embedding {} nodes from {} view(s), d = {}",
        graph.node_count(),
        graph.view_count(),
        config.factorize.d
    );
    let start = Instant::now();
    let out = mvne_embed(&graph, &config)?;
    let wall_time_secs = start.elapsed().as_secs_f64();

    let registry = graph.registry();
    let embedding = out.result.factorization.embedding();
    write_with(&args.output, |w| {
        write_embedding(embedding.view(), registry, w)
    })?;
    if let Some(path) = &args.combined {
        write_with(path, |w| write_edge_list(&out.combined, registry, w))?;
    }

    let report = &out.result.report;
    let betas = out.betas.as_slice().to_vec();
    let views = graph
        .views()
        .iter()
        .zip(sources)
        .zip(&betas)
        .map(|((v, Source { path, .. }), &beta)| ViewMeta {
            name: v.name.clone(),
            path,
            active_nodes: v.active_count(),
            edges: v.adjacency.edge_count(),
            beta,
        })
        .collect();
    let meta = EmbedMetadata {
        version: crate::VERSION,
        nodes: graph.node_count(),
        views,
        config,
        betas,
        iterations: report.iterations,
        converged: report.converged,
        best_iteration: report.best_iteration,
        final_objective: report.final_objective,
        objective_trace: report.objective_trace.clone(),
        flagged_nodes: report
            .degenerate_nodes
            .iter()
            .map(|&i| registry.name(i).to_owned())
            .collect(),
        wall_time_secs,
    };
    let meta_path = args
        .metadata
        .clone()
        .unwrap_or_else(|| sibling(&args.output, ".meta.json"));
    write_json(&meta_path, &meta)?;

    println!(
        "{} nodes, d = {}: {} iterations ({}), objective {:.6e}, {} flagged node(s)",
        meta.nodes,
        args.dim,
        meta.iterations,
        if meta.converged {
            "converged"
        } else {
            "iteration cap"
        },
        meta.final_objective,
        meta.flagged_nodes.len()
    );
    println!(
        "wrote {} and {}",
        args.output.display(),
        meta_path.display()
    );
    Ok(())
}
