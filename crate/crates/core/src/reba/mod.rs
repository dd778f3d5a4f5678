//! REBA scoring: joint bands, lookup tables, adjustments and action levels.

mod activity;
mod bands;
mod score;
mod table;

pub use activity::{activity_contexts, ActivityConfig, ActivityContext};
pub use bands::{joint_score_from_angle, AngleBand, AngleBandConfig, JointBands, JointScore, ModifierRule};
pub use score::{frame_reba, score_dataset, FramePostureScores, ScoreDiagnostic, ScoredDataset, ScoredFrame};
pub use table::{ScoreTable, TableDim, TableId};

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::frame::Coupling;
use crate::joint::{BodyPart, JointId};

/// The bundled asset transcribed from the standard REBA worksheet.
pub const STANDARD_ASSET_JSON: &str = include_str!("../../assets/reba_standard.json");

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RebaError {
    #[error("frame has no angle for {0}")]
    UnknownJoint(JointId),
    #[error("{joint}: angle {angle_deg} is outside the configured bands")]
    AngleOutsideConfiguredBands { joint: JointId, angle_deg: f64 },
    #[error("table {table}: index {index} out of range on dimension {dim}")]
    IndexOutOfRange { table: TableId, dim: usize, index: usize },
    #[error("unknown table `{0}`")]
    UnknownTable(String),
    #[error("grand score {0} outside [1, 15]")]
    OutOfRange(u8),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionLevel {
    Negligible,
    Low,
    Medium,
    High,
    VeryHigh,
}

impl ActionLevel {
    pub const ALL: [ActionLevel; 5] =
        [ActionLevel::Negligible, ActionLevel::Low, ActionLevel::Medium, ActionLevel::High, ActionLevel::VeryHigh];

    pub fn as_str(self) -> &'static str {
        match self {
            ActionLevel::Negligible => "negligible",
            ActionLevel::Low => "low",
            ActionLevel::Medium => "medium",
            ActionLevel::High => "high",
            ActionLevel::VeryHigh => "very_high",
        }
    }
}

impl fmt::Display for ActionLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for ActionLevel {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        ActionLevel::ALL.into_iter().find(|l| l.as_str() == s).ok_or(())
    }
}

/// Standard REBA action banding of a grand score.
pub fn action_level(grand: u8) -> Result<ActionLevel, RebaError> {
    match grand {
        1 => Ok(ActionLevel::Negligible),
        2..=3 => Ok(ActionLevel::Low),
        4..=7 => Ok(ActionLevel::Medium),
        8..=10 => Ok(ActionLevel::High),
        11..=15 => Ok(ActionLevel::VeryHigh),
        _ => Err(RebaError::OutOfRange(grand)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionBand {
    pub min: u8,
    pub max: u8,
    pub level: ActionLevel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoadBands {
    pub medium_from_kg: f64,
    pub heavy_above_kg: f64,
    pub shock_bonus: u8,
}

impl LoadBands {
    /// 0 below `medium_from_kg`, 1 up to `heavy_above_kg`, 2 above, plus the shock bonus.
    pub fn score(&self, load_kg: f64, shock: bool) -> u8 {
        let base = if load_kg < self.medium_from_kg {
            0
        } else if load_kg <= self.heavy_above_kg {
            1
        } else {
            2
        };
        base + if shock { self.shock_bonus } else { 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CouplingScores {
    pub good: u8,
    pub fair: u8,
    pub poor: u8,
    pub unacceptable: u8,
}

impl CouplingScores {
    pub fn score(&self, c: Coupling) -> u8 {
        match c {
            Coupling::Good => self.good,
            Coupling::Fair => self.fair,
            Coupling::Poor => self.poor,
            Coupling::Unacceptable => self.unacceptable,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RebaTables {
    #[serde(rename = "A")]
    pub a: ScoreTable,
    #[serde(rename = "B")]
    pub b: ScoreTable,
    #[serde(rename = "C")]
    pub c: ScoreTable,
}

impl RebaTables {
    pub fn get(&self, id: TableId) -> &ScoreTable {
        match id {
            TableId::A => &self.a,
            TableId::B => &self.b,
            TableId::C => &self.c,
        }
    }
}

/// Traffic-light class of a joint score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RiskClass {
    Low,
    Medium,
    High,
}

/// Everything needed to score frames: the three tables, angle bands,
/// load/coupling/activity rules and the action banding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RebaConfig {
    pub version: String,
    pub tables: RebaTables,
    pub angle_bands: AngleBandConfig,
    pub load_bands: LoadBands,
    pub coupling_scores: CouplingScores,
    pub action_levels: Vec<ActionBand>,
    #[serde(default)]
    pub activity: ActivityConfig,
}

impl RebaConfig {
    /// The bundled standard asset.
    pub fn standard() -> RebaConfig {
        serde_json::from_str(STANDARD_ASSET_JSON).expect("bundled REBA asset parses")
    }

    pub fn action_level(&self, grand: u8) -> Result<ActionLevel, RebaError> {
        self.action_levels
            .iter()
            .find(|b| (b.min..=b.max).contains(&grand))
            .map(|b| b.level)
            .ok_or(RebaError::OutOfRange(grand))
    }

    /// Gauge class: the joint's minimal score is low, its maximal score high,
    /// anything between medium.
    pub fn risk_class(&self, part: BodyPart, score: u8) -> RiskClass {
        let jb = self.angle_bands.joint(part);
        if score <= jb.min_score() {
            RiskClass::Low
        } else if score >= jb.max_score {
            RiskClass::High
        } else {
            RiskClass::Medium
        }
    }

    /// Every violated asset invariant, in a human-readable form.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for id in TableId::ALL {
            let t = self.tables.get(id);
            if t.table_id != id {
                out.push(format!("tables.{id}: table_id is {}", t.table_id));
                continue;
            }
            out.extend(t.violations());
        }
        self.angle_bands.check(&mut out);
        // Joint score ranges must match the table inputs they index.
        for (id, part, dim) in [
            (TableId::A, BodyPart::Neck, 0),
            (TableId::A, BodyPart::Leg, 1),
            (TableId::A, BodyPart::Trunk, 2),
            (TableId::B, BodyPart::LowerArm, 0),
            (TableId::B, BodyPart::Wrist, 1),
            (TableId::B, BodyPart::UpperArm, 2),
        ] {
            let card = self.tables.get(id).dims.get(dim).map_or(0, |d| d.cardinality);
            let max = self.angle_bands.joint(part).max_score;
            if usize::from(max) != card {
                out.push(format!("angle_bands.{part}.max_score {max} != table {id} cardinality {card}"));
            }
        }
        let mut expected = 1u8;
        for b in &self.action_levels {
            if b.min != expected || b.max < b.min {
                out.push(format!("action_levels: band {}..={} does not continue at {expected}", b.min, b.max));
            }
            expected = b.max.saturating_add(1);
        }
        if expected != 16 {
            out.push(format!("action_levels: bands must cover 1..=15, end at {}", expected - 1));
        }
        if self.action_levels.windows(2).any(|w| w[1].level < w[0].level) {
            out.push("action_levels: levels must not decrease with the grand score".into());
        }
        let lb = &self.load_bands;
        if lb.score(f64::INFINITY, true) > 3 {
            out.push("load_bands: maximal load score exceeds 3".into());
        }
        let cs = &self.coupling_scores;
        if cs.unacceptable > 3 || !(cs.good <= cs.fair && cs.fair <= cs.poor && cs.poor <= cs.unacceptable) {
            out.push("coupling_scores: must be non-decreasing and at most 3".into());
        }
        out
    }
}
