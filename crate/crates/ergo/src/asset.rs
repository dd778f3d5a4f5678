//! Loading and checking the REBA table asset.

use std::path::Path;

use ergo_core::reba::{RebaConfig, STANDARD_ASSET_JSON};
use sha2::{Digest, Sha256};

#[derive(Debug, thiserror::Error)]
pub enum AssetError {
    #[error("cannot read asset {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("asset is not valid JSON: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("asset violates {} invariant(s):\n  {}", .0.len(), .0.join("\n  "))]
    Invariants(Vec<String>),
}

/// A parsed and checked asset together with the SHA-256 of its bytes.
#[derive(Debug, Clone)]
pub struct Asset {
    pub config: RebaConfig,
    pub checksum: String,
}

impl Asset {
    /// The bundled standard worksheet.
    pub fn standard() -> Self {
        Self::from_bytes(STANDARD_ASSET_JSON.as_bytes()).expect("bundled asset is valid")
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, AssetError> {
        let config: RebaConfig = serde_json::from_slice(bytes)?;
        let violations = config.violations();
        if !violations.is_empty() {
            return Err(AssetError::Invariants(violations));
        }
        Ok(Asset { config, checksum: checksum(bytes) })
    }

    pub fn load(path: &Path) -> Result<Self, AssetError> {
        let bytes = std::fs::read(path).map_err(|source| AssetError::Io { path: path.display().to_string(), source })?;
        Self::from_bytes(&bytes)
    }

    /// `path` when given, otherwise the bundled asset.
    pub fn load_or_standard(path: Option<&Path>) -> Result<Self, AssetError> {
        path.map_or_else(|| Ok(Self::standard()), Self::load)
    }
}

pub fn checksum(bytes: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}
