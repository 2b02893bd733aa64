use std::path::PathBuf;

use clap::Args;
use mvne::graph::{view_stats, ViewStats};
use serde::Serialize;

use crate::failure::CmdResult;
use crate::input::InputArgs;
use crate::io::write_json;

#[derive(Debug, Clone, Args)]
#[command(args_override_self = true)]
pub struct StatsArgs {
    #[command(flatten)]
    pub input: InputArgs,

    /// Also write the table as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Serialize)]
struct StatsReport<'a> {
    nodes: usize,
    views: &'a [ViewStats],
}

pub fn run(args: &StatsArgs) -> CmdResult {
    let (graph, _) = args.input.load()?;
    let stats = view_stats(&graph);
    print!("{}", render_table(&stats));
    if let Some(path) = &args.json {
        write_json(
            path,
            &StatsReport {
                nodes: graph.node_count(),
                views: &stats,
            },
        )?;
    }
    Ok(())
}

/// Left-aligned name column, right-aligned numbers.
fn render_table(stats: &[ViewStats]) -> String {
    let header = [
        "view", "nodes", "edges", "loops", "weight", "deg_min", "deg_max", "deg_mean", "deg_med",
    ];
    let rows: Vec<[String; 9]> = stats
        .iter()
        .map(|s| {
            [
                s.name.clone(),
                s.nodes.to_string(),
                s.edges.to_string(),
                s.self_loops.to_string(),
                format!("{}", s.total_weight),
                s.degree.min.to_string(),
                s.degree.max.to_string(),
                format!("{:.2}", s.degree.mean),
                format!("{}", s.degree.median),
            ]
        })
        .collect();
    let mut width = header.map(str::len);
    for row in &rows {
        for (w, cell) in width.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let mut line = |cells: &[&str]| {
        let mut parts = Vec::with_capacity(cells.len());
        for (c, (cell, &w)) in cells.iter().zip(&width).enumerate() {
            parts.push(if c == 0 {
                format!("{cell:<w$}")
            } else {
                format!("{cell:>w$}")
            });
        }
        out.push_str(parts.join("  ").trim_end());
        out.push('\n');
    };
    line(&header);
    for row in &rows {
        line(&row.iter().map(String::as_str).collect::<Vec<_>>());
    }
    out
}
