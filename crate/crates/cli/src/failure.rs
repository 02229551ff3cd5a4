//! Errors mapped onto the process exit code.

use std::fmt;
use std::process::ExitCode;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Config,
    Domain,
    Io,
}

impl Kind {
    pub fn code(self) -> u8 {
        match self {
            Kind::Config => 2,
            Kind::Domain => 3,
            Kind::Io => 4,
        }
    }
}

#[derive(Debug)]
pub struct Failure {
    pub kind: Kind,
    pub error: anyhow::Error,
}

pub type Outcome<T> = std::result::Result<T, Failure>;

impl Failure {
    pub fn config(msg: impl fmt::Display) -> Self {
        Failure {
            kind: Kind::Config,
            error: anyhow::anyhow!("{msg}"),
        }
    }

    pub fn domain(msg: impl fmt::Display) -> Self {
        Failure {
            kind: Kind::Domain,
            error: anyhow::anyhow!("{msg}"),
        }
    }

    pub fn io(path: &std::path::Path, e: std::io::Error) -> Self {
        Failure {
            kind: Kind::Io,
            error: anyhow::Error::new(e).context(format!("{}", path.display())),
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.kind.code())
    }
}

impl From<copa_core::Error> for Failure {
    fn from(e: copa_core::Error) -> Self {
        let kind = classify(&e);
        Failure {
            kind,
            error: e.into(),
        }
    }
}

fn classify(e: &copa_core::Error) -> Kind {
    match e {
        copa_core::Error::Io { .. } => Kind::Io,
        copa_core::Error::Fold { source, .. } => classify(source),
        _ => Kind::Domain,
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.error)
    }
}
