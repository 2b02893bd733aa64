//! Exit-code classification: 2 for anything the caller can fix by changing
//! flags or input files, 1 for everything else.

use std::fmt;
use std::process::ExitCode;

#[derive(Debug)]
pub enum Failure {
    Input(anyhow::Error),
    Runtime(anyhow::Error),
}

pub type CmdResult<T = ()> = Result<T, Failure>;

impl Failure {
    pub fn input(msg: impl fmt::Display) -> Self {
        Failure::Input(anyhow::anyhow!("{msg}"))
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            Failure::Input(_) => ExitCode::from(2),
            Failure::Runtime(_) => ExitCode::from(1),
        }
    }

    /// Prefixes the message, keeping the classification.
    pub fn context(self, ctx: impl fmt::Display + Send + Sync + 'static) -> Self {
        match self {
            Failure::Input(e) => Failure::Input(e.context(ctx)),
            Failure::Runtime(e) => Failure::Runtime(e.context(ctx)),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(e) | Failure::Runtime(e) => write!(f, "{e:#}"),
        }
    }
}

impl From<mvne::Error> for Failure {
    fn from(e: mvne::Error) -> Self {
        if e.is_input_error() {
            Failure::Input(e.into())
        } else {
            Failure::Runtime(e.into())
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Runtime(e.into())
    }
}
