use std::path::PathBuf;

use stringbord_core::adams::AdamsError;

use crate::dsl::DslError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{origin}:{source}")]
    Dsl { origin: String, source: DslError },
    #[error("{origin}:{line}: {message}")]
    Syntax {
        origin: String,
        line: usize,
        message: String,
    },
    /// Assertions that cannot all hold, or a failed justification check.
    #[error("{0}")]
    Contradiction(String),
    /// A computed object failed a consistency check it must pass.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl CliError {
    /// Process exit status: 1 for bad input, 2 for contradictions and
    /// invariant breaches.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Contradiction(_) | CliError::Invariant(_) => 2,
            _ => 1,
        }
    }

    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }
}

impl From<AdamsError> for CliError {
    fn from(e: AdamsError) -> Self {
        match e {
            AdamsError::Contradiction { .. } | AdamsError::Witness(_) | AdamsError::Comparison(_) => {
                CliError::Contradiction(e.to_string())
            }
            AdamsError::Invariant(_) => CliError::Invariant(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
