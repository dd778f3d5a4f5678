use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use ergo_core::filter::{filter_outliers, FilterPolicy};
use ergo_core::reba::{score_dataset, ScoredDataset};
use ergo_core::selection::BrushSet;
use serde::{Deserialize, Serialize};
use uuid::Uuid;

use crate::asset::Asset;
use crate::manifest::{load_dataset, LoadOptions};
use crate::report::Report;

/// An immutable scored dataset with its image directory and report.
#[derive(Debug)]
pub struct DatasetEntry {
    pub scored: ScoredDataset,
    pub images_dir: PathBuf,
    pub report: Report,
}

impl DatasetEntry {
    pub fn new(scored: ScoredDataset, images_dir: PathBuf, asset_checksum: &str) -> Self {
        let report = Report::build(&scored, asset_checksum, 0.0);
        DatasetEntry { scored, images_dir, report }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub session_id: Uuid,
    pub dataset_id: String,
    pub brush_set: BrushSet,
    /// Seconds since the Unix epoch.
    pub created_at: f64,
}

/// Datasets are shared read-only; each session sits behind its own lock.
#[derive(Debug, Default)]
pub struct AppState {
    datasets: BTreeMap<String, Arc<DatasetEntry>>,
    sessions: RwLock<HashMap<Uuid, Arc<Mutex<Session>>>>,
    snapshot: Option<PathBuf>,
}

impl AppState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert_dataset(&mut self, entry: DatasetEntry) {
        self.datasets.insert(entry.scored.dataset().id.clone(), Arc::new(entry));
    }

    pub fn dataset(&self, id: &str) -> Option<Arc<DatasetEntry>> {
        self.datasets.get(id).cloned()
    }

    pub fn datasets(&self) -> impl Iterator<Item = &Arc<DatasetEntry>> {
        self.datasets.values()
    }

    /// Loads every `manifest.json` in `dir` or one level below it.
    /// Datasets that fail to load are skipped and reported as warnings.
    pub fn load_dir(dir: &Path, asset: &Asset, policy: &FilterPolicy) -> std::io::Result<(Self, Vec<String>)> {
        let mut manifests = Vec::new();
        let top = dir.join("manifest.json");
        if top.is_file() {
            manifests.push(top);
        }
        let mut subdirs: Vec<PathBuf> =
            std::fs::read_dir(dir)?.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| p.is_dir()).collect();
        subdirs.sort();
        manifests.extend(subdirs.into_iter().map(|d| d.join("manifest.json")).filter(|p| p.is_file()));

        let mut state = AppState::new();
        let mut warnings = Vec::new();
        let opts = LoadOptions::for_config(&asset.config);
        for path in manifests {
            let loaded = match load_dataset(&path, &opts) {
                Ok(l) => l,
                Err(e) => {
                    warnings.push(format!("{}: {e}", path.display()));
                    continue;
                }
            };
            let filtered = match filter_outliers(&loaded.dataset, policy) {
                Ok(d) => d,
                Err(e) => {
                    warnings.push(format!("{}: {e}", path.display()));
                    continue;
                }
            };
            if state.datasets.contains_key(&filtered.id) {
                warnings.push(format!("{}: duplicate dataset id {:?}", path.display(), filtered.id));
                continue;
            }
            let scored = score_dataset(filtered, &asset.config);
            state.insert_dataset(DatasetEntry::new(scored, loaded.images_dir, &asset.checksum));
        }
        Ok((state, warnings))
    }

    /// Persist sessions to `path` after every change, restoring any saved ones now.
    pub fn with_snapshot(mut self, path: PathBuf) -> std::io::Result<Self> {
        if path.is_file() {
            let saved: Vec<Session> = serde_json::from_slice(&std::fs::read(&path)?).map_err(std::io::Error::other)?;
            let mut sessions = self.sessions.write().expect("session map lock");
            for s in saved.into_iter().filter(|s| self.datasets.contains_key(&s.dataset_id)) {
                sessions.insert(s.session_id, Arc::new(Mutex::new(s)));
            }
        }
        self.snapshot = Some(path);
        Ok(self)
    }

    pub fn create_session(&self, dataset_id: &str, brush_set: BrushSet) -> Session {
        let created_at = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64());
        let session = Session { session_id: Uuid::new_v4(), dataset_id: dataset_id.into(), brush_set, created_at };
        self.sessions
            .write()
            .expect("session map lock")
            .insert(session.session_id, Arc::new(Mutex::new(session.clone())));
        self.persist();
        session
    }

    pub fn session(&self, id: Uuid) -> Option<Arc<Mutex<Session>>> {
        self.sessions.read().expect("session map lock").get(&id).cloned()
    }

    /// Writes all sessions to the snapshot file, if one is configured.
    pub fn persist(&self) {
        let Some(path) = &self.snapshot else { return };
        let handles: Vec<Arc<Mutex<Session>>> = self.sessions.read().expect("session map lock").values().cloned().collect();
        let mut all: Vec<Session> = handles.iter().map(|s| s.lock().expect("session lock").clone()).collect();
        all.sort_by(|a, b| a.created_at.total_cmp(&b.created_at).then(a.session_id.cmp(&b.session_id)));
        let tmp = path.with_extension("tmp");
        let json = serde_json::to_vec_pretty(&all).expect("sessions serialize");
        if let Err(e) = std::fs::write(&tmp, json).and_then(|()| std::fs::rename(&tmp, path)) {
            eprintln!("warning: cannot write session snapshot {}: {e}", path.display());
        }
    }
}
