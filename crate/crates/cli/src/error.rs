use std::path::PathBuf;

use thiserror::Error;

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("output directory {path} is not writable: {source}")]
    Unwritable {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Model(#[from] ecoopt_core::ModelError),
    #[error(transparent)]
    Solver(#[from] ecoopt_core::SolverError),
    #[error(transparent)]
    Sensitivity(#[from] ecoopt_core::sensitivity::SensitivityError),
    #[error(transparent)]
    Spec(#[from] ecoopt_core::datagen::SpecError),
    #[error(transparent)]
    Table(#[from] ecoopt_core::table::TableError),
    #[error(transparent)]
    Preprocess(#[from] ecoopt_core::preprocess::PreprocessError),
    #[error(transparent)]
    Experiment(#[from] ecoopt_core::experiments::ExperimentError),
}

impl CliError {
    /// Reading or writing files mid-run is an IO failure; everything that
    /// can be blamed on the invocation, including an output directory that
    /// cannot be created, is a usage error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => EXIT_IO,
            _ => EXIT_USAGE,
        }
    }
}
