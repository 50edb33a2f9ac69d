//! Command-line front end for lexforge: one subcommand per processing step,
//! plus `run` for manifest-driven pipelines.

use std::path::PathBuf;

pub mod args;
pub mod commands;
pub mod logging;
pub mod pipeline;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] lexforge::Error),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid manifest {}: {message}", path.display())]
    Manifest { path: PathBuf, message: String },

    #[error("stage {index} ({kind}) failed: {source}")]
    Stage {
        index: usize,
        kind: String,
        #[source]
        source: Box<CliError>,
    },
}

impl CliError {
    /// Process exit status: 2 for bad configuration, 1 for runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Manifest { .. } => 2,
            CliError::Core(lexforge::Error::InvalidConfig(_)) => 2,
            _ => 1,
        }
    }
}
