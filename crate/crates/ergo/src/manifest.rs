//! Dataset manifests and loading a dataset from disk.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use ergo_core::frame::{AngleRange, Dataset};
use ergo_core::joint::JointId;
use ergo_core::reba::RebaConfig;
use serde::{Deserialize, Serialize};

use crate::frames::{read_frames, ReadOptions};
use crate::IngestError;

/// `{id, frames_csv, images_dir, fps, meta}`; paths are relative to the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub id: String,
    pub frames_csv: PathBuf,
    #[serde(default)]
    pub images_dir: Option<PathBuf>,
    pub fps: f64,
    #[serde(default)]
    pub meta: BTreeMap<String, String>,
}

impl Manifest {
    pub fn read(path: &Path) -> Result<Self, IngestError> {
        let file = File::open(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => IngestError::MissingManifest { path: path.display().to_string() },
            _ => IngestError::io(path, e),
        })?;
        let m: Manifest = serde_json::from_reader(BufReader::new(file))
            .map_err(|source| IngestError::Manifest { path: path.display().to_string(), source })?;
        if !(m.fps > 0.0 && m.fps.is_finite()) {
            return Err(IngestError::InvalidFps(m.fps));
        }
        Ok(m)
    }

    pub fn write(&self, path: &Path) -> Result<(), IngestError> {
        let json = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(path, json + "\n").map_err(|e| IngestError::io(path, e))
    }
}

#[derive(Debug, Clone)]
pub struct LoadOptions {
    pub lenient: bool,
    pub ranges: BTreeMap<JointId, AngleRange>,
}

impl LoadOptions {
    pub fn for_config(config: &RebaConfig) -> Self {
        LoadOptions { lenient: false, ranges: config.angle_bands.valid_ranges() }
    }

    pub fn lenient(mut self, lenient: bool) -> Self {
        self.lenient = lenient;
        self
    }
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self::for_config(&RebaConfig::standard())
    }
}

/// A loaded dataset plus where its images live and what was skipped.
#[derive(Debug)]
pub struct LoadedDataset {
    pub dataset: Dataset,
    pub images_dir: PathBuf,
    pub diagnostics: Vec<IngestError>,
}

/// Reads the manifest at `path` and its frames file.
///
/// Frame indices are renumbered to be contiguous from the first row's
/// index; source indices missing from the file are listed in
/// `meta["index_gaps"]` as comma-separated ranges.
pub fn load_dataset(path: &Path, opts: &LoadOptions) -> Result<LoadedDataset, IngestError> {
    let manifest = Manifest::read(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let csv_path = base.join(&manifest.frames_csv);
    let file = File::open(&csv_path).map_err(|e| IngestError::io(&csv_path, e))?;
    let read_opts = ReadOptions { fps: manifest.fps, lenient: opts.lenient, ranges: opts.ranges.clone() };
    let read = read_frames(BufReader::new(file), &read_opts)?;

    let mut frames = read.frames;
    let mut meta = manifest.meta;
    if let Some(first) = frames.first().map(|f| f.frame_index) {
        let mut gaps = Vec::new();
        let mut expected = first;
        for (k, f) in frames.iter_mut().enumerate() {
            if f.frame_index > expected {
                gaps.push(if f.frame_index - 1 == expected {
                    expected.to_string()
                } else {
                    format!("{expected}-{}", f.frame_index - 1)
                });
            }
            expected = f.frame_index + 1;
            f.frame_index = first + k as u64;
        }
        if !gaps.is_empty() {
            meta.insert("index_gaps".into(), gaps.join(","));
        }
    }
    if !read.diagnostics.is_empty() {
        meta.insert("skipped_rows".into(), read.diagnostics.len().to_string());
    }

    let mut dataset = Dataset::new(manifest.id, manifest.fps, frames);
    dataset.meta = meta;
    let images_dir = base.join(manifest.images_dir.unwrap_or_default());
    Ok(LoadedDataset { dataset, images_dir, diagnostics: read.diagnostics })
}
