use std::path::PathBuf;

use clap::{ArgAction, Args};
use mvne::graph::{build_multiview, read_manifest};
use mvne::Graph;
use serde::Serialize;

use crate::failure::{CmdResult, Failure};
use crate::io::open_input;

/// Graph source shared by `embed` and `stats`.
#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Single-view edge list (`src dst [weight]` per line).
    #[arg(
        long,
        conflicts_with = "manifest",
        required_unless_present = "manifest"
    )]
    pub input: Option<PathBuf>,

    /// Multi-view manifest (`view_name path` per line).
    #[arg(long)]
    pub manifest: Option<PathBuf>,

    /// Read the optional third column as an edge weight.
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    pub weighted: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Source {
    pub view: String,
    pub path: PathBuf,
}

impl InputArgs {
    pub fn load(&self) -> CmdResult<(Graph, Vec<Source>)> {
        let entries = match (&self.input, &self.manifest) {
            (Some(path), None) => {
                let view = path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .filter(|s| !s.is_empty())
                    .unwrap_or_else(|| "view".to_owned());
                vec![(view, path.clone())]
            }
            (None, Some(manifest)) => {
                // surface a missing manifest as an input error, not I/O
                open_input(manifest)?;
                read_manifest(manifest).map_err(|e| {
                    Failure::from(e).context(format!("manifest {}", manifest.display()))
                })?
            }
            _ => return Err(Failure::input("give exactly one of --input and --manifest")),
        };
        let mut readers = Vec::with_capacity(entries.len());
        for (view, path) in &entries {
            readers.push((view.clone(), open_input(path)?));
        }
        let graph = build_multiview(readers, self.weighted)?;
        let sources = entries
            .into_iter()
            .map(|(view, path)| Source { view, path })
            .collect();
        Ok((graph, sources))
    }
}
