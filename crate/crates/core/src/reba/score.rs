use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::frame::{Dataset, FrameRecord};
use crate::joint::{BodyPart, BodySide, JointId};

use super::activity::{activity_contexts, ActivityContext};
use super::bands::{joint_score_from_angle, JointScore};
use super::{ActionLevel, RebaConfig, RebaError, TableId};

/// All REBA intermediate and final scores for one frame and one side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FramePostureScores {
    pub frame_index: u64,
    pub side: BodySide,
    pub joint_scores: BTreeMap<JointId, JointScore>,
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
}

impl FramePostureScores {
    pub fn joint_score(&self, part: BodyPart) -> u8 {
        self.joint_scores
            .get(&JointId::scored(part, self.side))
            .map_or(0, |s| s.score)
    }

    /// The 1-based cell coordinates this frame lands on in `table`, in the
    /// table's dimension order.
    pub fn table_inputs(&self, table: TableId) -> Vec<usize> {
        let j = |p| usize::from(self.joint_score(p));
        match table {
            TableId::A => alloc::vec![j(BodyPart::Neck), j(BodyPart::Leg), j(BodyPart::Trunk)],
            TableId::B => alloc::vec![j(BodyPart::LowerArm), j(BodyPart::Wrist), j(BodyPart::UpperArm)],
            TableId::C => alloc::vec![usize::from(self.score_a.min(12)), usize::from(self.score_b.min(12))],
        }
    }

    /// The score a table view groups by: the looked-up cell for A and B,
    /// the grand score for C.
    pub fn group_score(&self, table: TableId) -> u8 {
        match table {
            TableId::A => self.table_a,
            TableId::B => self.table_b,
            TableId::C => self.grand,
        }
    }
}

/// Scores one frame for one side.
///
/// Neck and trunk are shared between sides. The neck and trunk twist flags
/// are also set when the recorded twist angle exceeds the configured threshold.
pub fn frame_reba(
    frame: &FrameRecord,
    side: BodySide,
    config: &RebaConfig,
    activity: &ActivityContext,
) -> Result<FramePostureScores, RebaError> {
    let bands = &config.angle_bands;
    let mut joint_scores = BTreeMap::new();
    for part in BodyPart::ALL {
        let joint = JointId::scored(part, side);
        let angle = frame.angle(joint).ok_or(RebaError::UnknownJoint(joint))?;
        let mut flags = frame.flags(joint);
        let twist = match part {
            BodyPart::Neck => frame.neck_twist_deg,
            BodyPart::Trunk => frame.trunk_twist_deg,
            _ => 0.0,
        };
        if twist.abs() > bands.twist_threshold_deg {
            flags.twist = true;
        }
        joint_scores.insert(joint, joint_score_from_angle(joint, angle, &flags, bands)?);
    }
    let js = |p| usize::from(joint_scores[&JointId::scored(p, side)].score);

    let table_a = config.tables.a.lookup(&[js(BodyPart::Neck), js(BodyPart::Leg), js(BodyPart::Trunk)])?;
    let load_score = config.load_bands.score(frame.load_kg, frame.shock_force);
    let score_a = table_a + load_score;

    let table_b =
        config.tables.b.lookup(&[js(BodyPart::LowerArm), js(BodyPart::Wrist), js(BodyPart::UpperArm)])?;
    let coupling_score = config.coupling_scores.score(frame.coupling);
    let score_b = table_b + coupling_score;

    let table_c = config.tables.c.lookup(&[usize::from(score_a.min(12)), usize::from(score_b.min(12))])?;
    let activity_score = activity.score();
    let grand = table_c + activity_score;
    let action_level = config.action_level(grand)?;

    Ok(FramePostureScores {
        frame_index: frame.frame_index,
        side,
        joint_scores,
        table_a,
        load_score,
        score_a,
        table_b,
        coupling_score,
        score_b,
        table_c,
        activity_score,
        grand,
        action_level,
    })
}

/// Both sides' scores for one included frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredFrame {
    /// Position of the frame in `Dataset::frames`.
    pub position: usize,
    pub frame_index: u64,
    pub timestamp_s: f64,
    pub left: FramePostureScores,
    pub right: FramePostureScores,
}

impl ScoredFrame {
    pub fn side(&self, side: BodySide) -> &FramePostureScores {
        match side {
            BodySide::Left => &self.left,
            BodySide::Right => &self.right,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreDiagnostic {
    pub frame_index: u64,
    pub side: BodySide,
    pub message: String,
}

/// A dataset together with the scores of its included frames.
///
/// Frames that are excluded, or that failed to score, have no entry in
/// `frames`; aggregation treats only scored frames as included.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredDataset {
    dataset: Dataset,
    config: RebaConfig,
    frames: Vec<ScoredFrame>,
    diagnostics: Vec<ScoreDiagnostic>,
}

impl ScoredDataset {
    pub fn dataset(&self) -> &Dataset {
        &self.dataset
    }

    pub fn config(&self) -> &RebaConfig {
        &self.config
    }

    pub fn frames(&self) -> &[ScoredFrame] {
        &self.frames
    }

    pub fn diagnostics(&self) -> &[ScoreDiagnostic] {
        &self.diagnostics
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn get(&self, frame_index: u64) -> Option<&ScoredFrame> {
        self.frames
            .binary_search_by_key(&frame_index, |f| f.frame_index)
            .ok()
            .map(|i| &self.frames[i])
    }

    pub fn record(&self, frame: &ScoredFrame) -> &FrameRecord {
        &self.dataset.frames[frame.position]
    }
}

/// Scores both sides of every included frame, in frame order.
///
/// A frame that fails on either side is left out and a diagnostic recorded;
/// scoring never aborts.
pub fn score_dataset(dataset: Dataset, config: &RebaConfig) -> ScoredDataset {
    let left_ctx = activity_contexts(&dataset, BodySide::Left, config);
    let right_ctx = activity_contexts(&dataset, BodySide::Right, config);
    let mut frames = Vec::with_capacity(dataset.frames.len());
    let mut diagnostics = Vec::new();
    for (position, f) in dataset.frames.iter().enumerate() {
        if dataset.is_excluded(f.frame_index) {
            continue;
        }
        let left = frame_reba(f, BodySide::Left, config, &left_ctx[position]);
        let right = frame_reba(f, BodySide::Right, config, &right_ctx[position]);
        match (left, right) {
            (Ok(left), Ok(right)) => frames.push(ScoredFrame {
                position,
                frame_index: f.frame_index,
                timestamp_s: f.timestamp_s,
                left,
                right,
            }),
            (l, r) => {
                for (side, res) in [(BodySide::Left, l), (BodySide::Right, r)] {
                    if let Err(e) = res {
                        diagnostics.push(ScoreDiagnostic {
                            frame_index: f.frame_index,
                            side,
                            message: alloc::format!("{e}"),
                        });
                    }
                }
            }
        }
    }
    ScoredDataset { dataset, config: config.clone(), frames, diagnostics }
}
