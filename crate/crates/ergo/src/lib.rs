//! Disk formats, reports, synthetic recordings, the `ergo` command line and
//! the HTTP query service on top of `ergo-core`.

pub mod asset;
pub mod cli;
pub mod frames;
pub mod manifest;
pub mod report;
pub mod server;
pub mod synthetic;

use std::path::Path;

pub use asset::{Asset, AssetError};
pub use manifest::{load_dataset, LoadOptions, LoadedDataset, Manifest};
pub use report::Report;

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("manifest not found: {path}")]
    MissingManifest { path: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("manifest {path}: {source}")]
    Manifest { path: String, source: serde_json::Error },
    #[error("fps must be positive, got {0}")]
    InvalidFps(f64),
    #[error("row {row}, column {column}: {detail}")]
    SchemaMismatch { column: String, row: usize, detail: String },
    #[error("row {row}: timestamp does not increase")]
    NonMonotoneTimestamp { row: usize },
}

impl IngestError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        IngestError::Io { path: path.display().to_string(), source }
    }
}
