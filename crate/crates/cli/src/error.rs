use std::io;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl RunError {
    pub fn config(msg: impl Into<String>) -> Self {
        RunError::Config(msg.into())
    }

    /// Parameter and config errors are the user's to fix; anything else
    /// from the core is numerical.
    pub fn from_core(e: hybridnet_core::Error) -> Self {
        use hybridnet_core::Error as E;
        match e {
            E::InvalidParameter { .. } | E::Config { .. } => RunError::Config(e.to_string()),
            other => RunError::Numerical(other.to_string()),
        }
    }

    pub fn numerical(context: &str, e: hybridnet_core::Error) -> Self {
        match RunError::from_core(e) {
            RunError::Numerical(m) => RunError::Numerical(format!("{context}: {m}")),
            other => other,
        }
    }

    pub fn io(path: &Path, e: io::Error) -> Self {
        RunError::Io(format!("{}: {e}", path.display()))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Numerical(_) => 3,
            RunError::Io(_) => 4,
        }
    }
}
