use std::path::Path;

use snv_core::defect::ModelError;
use snv_core::dynamics::DynamicsError;
use snv_core::fitting::FitError;
use snv_core::spectra::SpectraError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("missing column {0}")]
    MissingColumn(String),
    #[error("line {line}, column {column}: not a number")]
    BadNumber { line: u64, column: String },
    #[error("{0}: no data rows")]
    EmptyFile(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Fit(#[from] FitError),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "UsageError",
            CliError::Config(_) => "InvalidConfig",
            CliError::Io { .. } => "IoError",
            CliError::MissingColumn(_) => "MissingColumn",
            CliError::BadNumber { .. } => "BadNumber",
            CliError::EmptyFile(_) => "EmptyFile",
            CliError::Model(e) => e.name(),
            CliError::Spectra(e) => e.name(),
            CliError::Dynamics(e) => e.name(),
            CliError::Fit(e) => e.name(),
        }
    }

    /// 2 for malformed invocations and configurations, 1 for everything that
    /// fails while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 2,
            _ => 1,
        }
    }
}
