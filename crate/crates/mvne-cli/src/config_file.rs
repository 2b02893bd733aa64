//! Optional `key = value` files. Each entry becomes `--key=value` and is
//! spliced in right after the subcommand name, ahead of the user's flags,
//! so anything given on the command line wins.

use std::ffi::OsString;
use std::fs;
use std::path::Path;

use crate::failure::{CmdResult, Failure};

/// Reads a config file into long-flag arguments. Keys may use `_` or `-`;
/// blank lines and `#` comments are skipped.
pub fn read_config(path: &Path) -> CmdResult<Vec<OsString>> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("cannot read config file {}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| e.context(format!("config file {}", path.display())))
}

pub fn parse_config(text: &str) -> CmdResult<Vec<OsString>> {
    let mut args = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Failure::input(format!(
                "line {}: expected `key = value`",
                idx + 1
            )));
        };
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        if key.is_empty() || value.is_empty() {
            return Err(Failure::input(format!(
                "line {}: empty key or value",
                idx + 1
            )));
        }
        if key == "config" {
            return Err(Failure::input(format!(
                "line {}: config files cannot nest",
                idx + 1
            )));
        }
        args.push(OsString::from(format!("--{key}={value}")));
    }
    Ok(args)
}

/// Inserts `extra` after the first occurrence of `subcommand`.
pub fn splice(raw: &[OsString], subcommand: &str, extra: Vec<OsString>) -> Vec<OsString> {
    let at = raw
        .iter()
        .skip(1)
        .position(|a| a == subcommand)
        .map_or(raw.len(), |p| p + 2);
    let mut out = raw[..at].to_vec();
    out.extend(extra);
    out.extend_from_slice(&raw[at..]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn parses_entries() {
        let args = parse_config("# run\nmax_iters = 20\n\ndim=8\n").unwrap();
        assert_eq!(args, os(&["--max-iters=20", "--dim=8"]));
    }

    #[test]
    fn rejects_garbage_and_nesting() {
        assert!(matches!(parse_config("dim 8"), Err(Failure::Input(_))));
        assert!(matches!(parse_config("dim ="), Err(Failure::Input(_))));
        assert!(matches!(parse_config("config = a"), Err(Failure::Input(_))));
    }

    #[test]
    fn file_flags_precede_user_flags() {
        let raw = os(&["mvne", "--threads", "2", "embed", "--dim", "4"]);
        let out = splice(&raw, "embed", os(&["--dim=8"]));
        assert_eq!(
            out,
            os(&["mvne", "--threads", "2", "embed", "--dim=8", "--dim", "4"])
        );
    }
}
