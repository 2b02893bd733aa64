use std::path::PathBuf;

use clap::Args;
use mvne::testkit::{generate_multiview_sbm, SbmInfo, SbmSpec, ViewNoise};
use serde::Serialize;

use crate::failure::{CmdResult, Failure};
use crate::io::write_json;

/// Defaults reproduce the three-view degraded dataset used in the
/// acceptance suite.
#[derive(Debug, Clone, Args)]
#[command(args_override_self = true)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 200)]
    pub nodes: usize,

    #[arg(long, default_value_t = 4)]
    pub communities: usize,

    /// Within-community edge probability.
    #[arg(long, default_value_t = 0.3)]
    pub p_in: f64,

    /// Cross-community edge probability.
    #[arg(long, default_value_t = 0.01)]
    pub p_out: f64,

    #[arg(long, default_value_t = 3)]
    pub views: usize,

    /// Probability that a base edge survives into each view.
    #[arg(long, default_value_t = 0.4)]
    pub keep: f64,

    /// Expected noise edges per view, as a fraction of base edges.
    #[arg(long, default_value_t = 0.2)]
    pub noise: f64,

    #[arg(long, default_value_t = 42)]
    pub seed: u64,

    /// Directory for `manifest.tsv`, `<view>.edges`, `labels.tsv` and
    /// `synth.json`; created if missing.
    #[arg(short, long)]
    pub output_dir: PathBuf,
}

#[derive(Serialize)]
struct SynthRecord<'a> {
    spec: &'a SbmSpec,
    info: &'a SbmInfo,
}

pub fn run(args: &SynthArgs) -> CmdResult {
    let spec = SbmSpec::uniform(
        args.nodes,
        args.communities,
        args.p_in,
        args.p_out,
        args.views,
        ViewNoise {
            keep: args.keep,
            noise: args.noise,
        },
        args.seed,
    );
    let data = generate_multiview_sbm(&spec)?;
    data.write_dataset(&args.output_dir).map_err(|e| {
        Failure::from(e).context(format!("writing dataset to {}", args.output_dir.display()))
    })?;
    write_json(
        &args.output_dir.join("synth.json"),
        &SynthRecord {
            spec: &spec,
            info: &data.info,
        },
    )?;
    println!(
        "{} nodes, {} communities, {} base edges",
        spec.n, spec.communities, data.info.base_edges
    );
    for (v, info) in data.graph.views().iter().zip(&data.info.views) {
        println!(
            "  {}: {} kept + {} noise edges",
            v.name, info.kept, info.noise
        );
    }
    println!("wrote {}", args.output_dir.display());
    Ok(())
}
