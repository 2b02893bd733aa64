use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::failure::{CmdResult, Failure};

/// Opens a file the user pointed us at; failure is an input error.
pub fn open_input(path: &Path) -> CmdResult<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Failure::input(format!("cannot open {}: {e}", path.display())))
}

pub fn write_with<F>(path: &Path, body: F) -> CmdResult
where
    F: FnOnce(&mut BufWriter<File>) -> mvne::Result<()>,
{
    let file = File::create(path)
        .map_err(|e| Failure::Runtime(anyhow::anyhow!("cannot create {}: {e}", path.display())))?;
    let mut out = BufWriter::new(file);
    body(&mut out)
        .and_then(|()| out.flush().map_err(mvne::Error::from))
        .map_err(|e| Failure::from(e).context(format!("writing {}", path.display())))
}

/// Pretty JSON with a trailing newline.
pub fn write_json<S: Serialize>(path: &Path, value: &S) -> CmdResult {
    let text = serde_json::to_string_pretty(value)?;
    write_with(path, |w| {
        w.write_all(text.as_bytes())?;
        w.write_all(b"\n")?;
        Ok(())
    })
}

/// `path` with `suffix` appended to its file name.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}
