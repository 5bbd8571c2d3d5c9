use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("cannot parse {path}: {source}")]
    ConfigFile {
        path: PathBuf,
        #[source]
        source: toml::de::Error,
    },
    #[error("solver failed at step {step}: {source}")]
    Solver {
        step: usize,
        #[source]
        source: esav_core::Error,
    },
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl BenchError {
    pub fn config(msg: impl Into<String>) -> Self {
        BenchError::Config(msg.into())
    }

    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        BenchError::Io { context: context.into(), source }
    }

    /// Process exit status: 3 for bad input, 2 for anything that went wrong
    /// while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Config(_) | BenchError::ConfigFile { .. } => 3,
            BenchError::Solver { .. }
            | BenchError::NonFinite(_)
            | BenchError::Invariant(_)
            | BenchError::Io { .. } => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, BenchError>;
