//! Scoring reports and the scored output directory.
//!
//! A scored directory holds `scores.csv` (one row per frame and side),
//! `scores.meta.json` and `report.json`. The report is always built from
//! the rows, so re-reading the directory reproduces it exactly.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use ergo_core::joint::{BodyPart, BodySide};
use ergo_core::reba::{ActionLevel, ScoredDataset};
use serde::{Deserialize, Serialize};

pub const SCORES_CSV: &str = "scores.csv";
pub const META_JSON: &str = "scores.meta.json";
pub const REPORT_JSON: &str = "report.json";
pub const DEFAULT_WORST_K: usize = 10;

/// One side's scores for one frame, as written to `scores.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub frame_index: u64,
    pub timestamp_s: f64,
    pub side: BodySide,
    pub neck: u8,
    pub trunk: u8,
    pub leg: u8,
    pub upper_arm: u8,
    pub lower_arm: u8,
    pub wrist: u8,
    pub table_a: u8,
    pub load_score: u8,
    pub score_a: u8,
    pub table_b: u8,
    pub coupling_score: u8,
    pub score_b: u8,
    pub table_c: u8,
    pub activity_score: u8,
    pub grand: u8,
    pub action_level: ActionLevel,
    pub image_ref: Option<String>,
}

pub fn score_rows(scored: &ScoredDataset) -> Vec<ScoreRow> {
    let mut rows = Vec::with_capacity(scored.len() * 2);
    for f in scored.frames() {
        let image_ref = scored.record(f).image_ref.clone();
        for side in BodySide::BOTH {
            let s = f.side(side);
            rows.push(ScoreRow {
                frame_index: f.frame_index,
                timestamp_s: f.timestamp_s,
                side,
                neck: s.joint_score(BodyPart::Neck),
                trunk: s.joint_score(BodyPart::Trunk),
                leg: s.joint_score(BodyPart::Leg),
                upper_arm: s.joint_score(BodyPart::UpperArm),
                lower_arm: s.joint_score(BodyPart::LowerArm),
                wrist: s.joint_score(BodyPart::Wrist),
                table_a: s.table_a,
                load_score: s.load_score,
                score_a: s.score_a,
                table_b: s.table_b,
                coupling_score: s.coupling_score,
                score_b: s.score_b,
                table_c: s.table_c,
                activity_score: s.activity_score,
                grand: s.grand,
                action_level: s.action_level,
                image_ref: image_ref.clone(),
            });
        }
    }
    rows
}

/// Run facts that are not recoverable from the rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredMeta {
    pub dataset_id: String,
    pub fps: f64,
    pub frames: u64,
    pub excluded: u64,
    pub scoring_failures: Vec<String>,
    pub asset_version: String,
    pub asset_checksum: String,
    pub runtime_ms: f64,
}

impl ScoredMeta {
    pub fn new(scored: &ScoredDataset, asset_checksum: &str, runtime_ms: f64) -> Self {
        let d = scored.dataset();
        ScoredMeta {
            dataset_id: d.id.clone(),
            fps: d.fps,
            frames: d.frames.len() as u64,
            excluded: d.excluded.len() as u64,
            scoring_failures: scored
                .diagnostics()
                .iter()
                .map(|x| format!("frame {} ({}): {}", x.frame_index, x.side, x.message))
                .collect(),
            asset_version: scored.config().version.clone(),
            asset_checksum: asset_checksum.to_string(),
            runtime_ms,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelCount {
    pub level: ActionLevel,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorstFrame {
    pub frame_index: u64,
    pub timestamp_s: f64,
    pub side: BodySide,
    pub grand: u8,
    pub action_level: ActionLevel,
    pub image_ref: Option<String>,
}

/// Counts of grand scores 1..=15, index `grand - 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrandHistogram {
    pub left: Vec<u64>,
    pub right: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub dataset_id: String,
    pub frames: u64,
    pub included: u64,
    pub excluded: u64,
    pub scoring_failures: u64,
    pub grand_histogram: GrandHistogram,
    /// Over both sides, so the counts add up to `2 * included`.
    pub action_levels: Vec<LevelCount>,
    pub worst: Vec<WorstFrame>,
    pub asset_version: String,
    pub asset_checksum: String,
    pub runtime_ms: f64,
}

impl Report {
    pub fn from_rows(meta: &ScoredMeta, rows: &[ScoreRow], worst_k: usize) -> Self {
        let mut grand_histogram = GrandHistogram { left: vec![0; 15], right: vec![0; 15] };
        let mut action_levels: Vec<LevelCount> =
            ActionLevel::ALL.iter().map(|&level| LevelCount { level, count: 0 }).collect();
        for r in rows {
            let hist = match r.side {
                BodySide::Left => &mut grand_histogram.left,
                BodySide::Right => &mut grand_histogram.right,
            };
            if let Some(bin) = hist.get_mut(usize::from(r.grand).wrapping_sub(1)) {
                *bin += 1;
            }
            if let Some(c) = action_levels.iter_mut().find(|c| c.level == r.action_level) {
                c.count += 1;
            }
        }
        let mut ranked: Vec<&ScoreRow> = rows.iter().collect();
        ranked.sort_by(|a, b| b.grand.cmp(&a.grand).then(a.frame_index.cmp(&b.frame_index)).then(a.side.cmp(&b.side)));
        let worst = ranked
            .into_iter()
            .take(worst_k)
            .map(|r| WorstFrame {
                frame_index: r.frame_index,
                timestamp_s: r.timestamp_s,
                side: r.side,
                grand: r.grand,
                action_level: r.action_level,
                image_ref: r.image_ref.clone(),
            })
            .collect();
        let mut included: Vec<u64> = rows.iter().map(|r| r.frame_index).collect();
        included.dedup();
        Report {
            dataset_id: meta.dataset_id.clone(),
            frames: meta.frames,
            included: included.len() as u64,
            excluded: meta.excluded,
            scoring_failures: meta.scoring_failures.len() as u64,
            grand_histogram,
            action_levels,
            worst,
            asset_version: meta.asset_version.clone(),
            asset_checksum: meta.asset_checksum.clone(),
            runtime_ms: meta.runtime_ms,
        }
    }

    pub fn build(scored: &ScoredDataset, asset_checksum: &str, runtime_ms: f64) -> Self {
        Self::from_rows(&ScoredMeta::new(scored, asset_checksum, runtime_ms), &score_rows(scored), DEFAULT_WORST_K)
    }

    pub fn action_level_total(&self) -> u64 {
        self.action_levels.iter().map(|c| c.count).sum()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ScoredIoError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Csv { path: String, source: csv::Error },
    #[error("{path}: {source}")]
    Json { path: String, source: serde_json::Error },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ScoredIoError + '_ {
    move |source| ScoredIoError::Io { path: path.display().to_string(), source }
}

/// Writes the three output files into `dir` (created if needed) and returns the report.
pub fn write_scored(dir: &Path, meta: &ScoredMeta, rows: &[ScoreRow]) -> Result<Report, ScoredIoError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let csv_path = dir.join(SCORES_CSV);
    let file = File::create(&csv_path).map_err(io_err(&csv_path))?;
    let csv_err = |source| ScoredIoError::Csv { path: csv_path.display().to_string(), source };
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush().map_err(io_err(&csv_path))?;

    let report = Report::from_rows(meta, rows, DEFAULT_WORST_K);
    write_json(&dir.join(META_JSON), meta)?;
    write_json(&dir.join(REPORT_JSON), &report)?;
    Ok(report)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), ScoredIoError> {
    let json = serde_json::to_string_pretty(value).expect("plain data serializes");
    std::fs::write(path, json + "\n").map_err(io_err(path))
}

/// The scored directory for `path`, which may name the directory or its `scores.csv`.
pub fn scored_dir(path: &Path) -> PathBuf {
    if path.is_dir() {
        path.to_path_buf()
    } else {
        path.parent().map_or_else(|| PathBuf::from("."), Path::to_path_buf)
    }
}

pub fn read_scored(path: &Path) -> Result<(ScoredMeta, Vec<ScoreRow>), ScoredIoError> {
    let dir = scored_dir(path);
    let meta_path = dir.join(META_JSON);
    let file = File::open(&meta_path).map_err(io_err(&meta_path))?;
    let meta: ScoredMeta = serde_json::from_reader(BufReader::new(file))
        .map_err(|source| ScoredIoError::Json { path: meta_path.display().to_string(), source })?;
    let csv_path = dir.join(SCORES_CSV);
    let csv_err = |source| ScoredIoError::Csv { path: csv_path.display().to_string(), source };
    let mut reader = csv::Reader::from_path(&csv_path).map_err(csv_err)?;
    let rows = reader.deserialize().collect::<Result<Vec<ScoreRow>, _>>().map_err(csv_err)?;
    Ok((meta, rows))
}
