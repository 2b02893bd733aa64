use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A text input could not be parsed. `line` is 1-based.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Input parsed but violates a documented constraint.
    #[error("invalid input: {0}")]
    Validation(String),

    /// Identifiers that are not present in the node registry.
    #[error("unknown node identifier(s): {}", preview(.0))]
    UnknownNodes(Vec<String>),

    /// Mismatched shapes between cooperating structures.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }

    /// True when the failure came from the caller's input rather than the
    /// environment (I/O).
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Io(_))
    }
}

fn preview(ids: &[String]) -> String {
    const SHOWN: usize = 10;
    let mut s = ids
        .iter()
        .take(SHOWN)
        .map(|s| format!("{s:?}"))
        .collect::<Vec<_>>()
        .join(", ");
    if ids.len() > SHOWN {
        s.push_str(&format!(" and {} more", ids.len() - SHOWN));
    }
    s
}
