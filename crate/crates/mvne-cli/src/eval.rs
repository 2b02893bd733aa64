use std::path::PathBuf;

use clap::Args;
use mvne::eval::{run_protocol, ClassifierConfig, EvalProtocol, EvalReport};
use mvne::factorization::read_embedding;
use mvne::graph::load_labels;
use mvne::Error;

use crate::failure::{CmdResult, Failure};
use crate::io::{open_input, write_json, write_with};

#[derive(Debug, Clone, Args)]
#[command(args_override_self = true)]
pub struct EvalArgs {
    /// Embedding file as written by `embed`.
    #[arg(long)]
    pub embedding: PathBuf,

    /// `node label[,label...]` per line.
    #[arg(long)]
    pub labels: PathBuf,

    /// Comma-separated train fractions.
    #[arg(
        long,
        value_delimiter = ',',
        default_values_t = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]
    )]
    pub fractions: Vec<f64>,

    /// Random splits per fraction.
    #[arg(long, default_value_t = 10)]
    pub repeats: usize,

    #[arg(long, default_value_t = 42)]
    pub seed: u64,

    /// L2 penalty on the summed log-loss (1 / C).
    #[arg(long, default_value_t = 1.0)]
    pub reg: f64,

    /// Report JSON to write.
    #[arg(short, long)]
    pub output: PathBuf,

    /// Plot-ready TSV. Defaults to the report path with a `.tsv` extension.
    #[arg(long)]
    pub tsv: Option<PathBuf>,
}

pub fn run(args: &EvalArgs) -> CmdResult {
    let (registry, x) = read_embedding::<f64, _>(open_input(&args.embedding)?)
        .map_err(|e| Failure::from(e).context(format!("embedding {}", args.embedding.display())))?;
    let labels = load_labels(open_input(&args.labels)?, &registry).map_err(|e| match e {
        Error::UnknownNodes(ref ids) => {
            let n = ids.len();
            Failure::from(e).context(format!("{n} labeled node(s) missing from the embedding"))
        }
        other => Failure::from(other).context(format!("labels {}", args.labels.display())),
    })?;
    if labels.labeled_nodes().is_empty() {
        return Err(Failure::input("label file assigns no labels"));
    }
    let protocol = EvalProtocol {
        fractions: args.fractions.clone(),
        repeats: args.repeats,
        seed: args.seed,
        classifier: ClassifierConfig {
            reg: args.reg,
            ..ClassifierConfig::default()
        },
    };
    let report = run_protocol(x.view(), &labels, &protocol)?;
    write_json(&args.output, &report)?;
    let tsv = args
        .tsv
        .clone()
        .unwrap_or_else(|| args.output.with_extension("tsv"));
    write_with(&tsv, |w| report.write_tsv(w))?;
    print_summary(&report);
    Ok(())
}

fn print_summary(report: &EvalReport) {
    println!(
        "{} labeled nodes, {} labels, {} repeat(s)",
        report.labeled_nodes, report.label_count, report.protocol.repeats
    );
    println!("fraction  micro_f1  sd       macro_f1  sd");
    for r in &report.results {
        println!(
            "{:<8}  {:.4}    {:.4}   {:.4}    {:.4}",
            r.fraction, r.mean_micro, r.sd_micro, r.mean_macro, r.sd_macro
        );
    }
}
