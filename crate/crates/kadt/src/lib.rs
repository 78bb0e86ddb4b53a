//! Command-line front end and test harnesses for `kadt-core`.
//!
//! Besides the `kadt` binary this crate holds the JSON model-file format,
//! seeded generators for random expressions and models, and the fuzzing
//! and law-checking harnesses used by the test suites.

pub mod fuzz;
pub mod gen;
pub mod lawsuite;
pub mod modelfile;
pub mod report;

pub use modelfile::ModelFile;

/// Errors of the front end.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] kadt_core::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("model file: {0}")]
    Model(String),
    #[error("{0}")]
    Usage(String),
    #[error("writing output: {0}")]
    Stdout(#[from] std::io::Error),
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
