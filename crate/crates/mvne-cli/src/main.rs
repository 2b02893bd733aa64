//! `mvne`: embed single- or multi-view graphs, score embeddings on node
//! label prediction, summarize inputs and generate synthetic datasets.

mod config_file;
mod embed;
mod eval;
mod failure;
mod input;
mod io;
mod stats;
mod synth;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::failure::{CmdResult, Failure};

pub const VERSION: &str = concat!(
    env!("CARGO_PKG_VERSION"),
    " (commit ",
    env!("MVNE_BUILD_COMMIT"),
    ", ",
    env!("MVNE_BUILD_PROFILE"),
    ", ",
    env!("MVNE_BUILD_TARGET"),
    ")"
);

#[derive(Debug, Parser)]
#[command(name = "mvne", version = VERSION, about, args_override_self = true)]
struct Cli {
    /// `key = value` file of long flags; flags on the command line win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Worker threads (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Factorize one view or a combination of views into node embeddings.
    Embed(embed::EmbedArgs),
    /// Score an embedding by one-vs-rest node label prediction.
    Eval(eval::EvalArgs),
    /// Per-view node, edge and degree counts.
    Stats(stats::StatsArgs),
    /// Write a synthetic multi-view block-model dataset.
    Synth(synth::SynthArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Embed(_) => "embed",
            Command::Eval(_) => "eval",
            Command::Stats(_) => "stats",
            Command::Synth(_) => "synth",
        }
    }
}

fn parse(raw: Vec<OsString>) -> CmdResult<Cli> {
    let cli = Cli::try_parse_from(&raw).unwrap_or_else(|e| e.exit());
    let Some(path) = cli.config.clone() else {
        return Ok(cli);
    };
    let extra = config_file::read_config(&path)?;
    let argv = config_file::splice(&raw, cli.command.name(), extra);
    Ok(Cli::try_parse_from(argv).unwrap_or_else(|e| e.exit()))
}

fn run(cli: Cli) -> CmdResult {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(Failure::input("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Failure::Runtime(e.into()))?;
    }
    match &cli.command {
        Command::Embed(a) => embed::run(a),
        Command::Eval(a) => eval::run(a),
        Command::Stats(a) => stats::run(a),
        Command::Synth(a) => synth::run(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match parse(std::env::args_os().collect()).and_then(run) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
