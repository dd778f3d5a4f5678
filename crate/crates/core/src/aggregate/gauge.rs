use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::frame::AngleRange;
use crate::joint::{BodySide, JointId};
use crate::reba::{RiskClass, ScoredDataset, ScoredFrame};
use crate::selection::FrameIdSet;

use super::in_scope;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaugeEntry {
    pub frame_index: u64,
    pub angle_deg: f64,
    pub risk_class: RiskClass,
    pub joint_score: u8,
}

/// Angular distribution of one joint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaugeSeries {
    pub joint: JointId,
    pub valid_range: AngleRange,
    /// Lowest and highest joint score, for the line-length channel.
    pub score_range: (u8, u8),
    /// `false` asks clients for the single-colour rendering.
    pub colored: bool,
    pub entries: Vec<GaugeEntry>,
    /// Counts over 1° bins starting at `valid_range.min`.
    pub density_bins: Vec<u64>,
}

impl GaugeSeries {
    pub fn monochrome(mut self) -> Self {
        self.colored = false;
        self
    }
}

/// The side whose evaluation carries `joint`'s score; axial joints read the left one.
pub(crate) fn scoring_side(joint: JointId) -> BodySide {
    joint.body_side().unwrap_or(BodySide::Left)
}

pub(crate) fn joint_score_of(frame: &ScoredFrame, joint: JointId) -> u8 {
    frame.side(scoring_side(joint)).joint_score(joint.part())
}

pub fn gauge_distribution(scored: &ScoredDataset, joint: JointId, selection: Option<&FrameIdSet>) -> GaugeSeries {
    let config = scored.config();
    let bands = config.angle_bands.joint(joint.part());
    let valid_range = bands.valid_range();
    let nbins = (libm::ceil(valid_range.max - valid_range.min) as usize).max(1);
    let mut density_bins = vec![0u64; nbins];
    let mut entries = Vec::new();
    for f in scored.frames().iter().filter(|f| in_scope(f.frame_index, selection)) {
        let Some(angle_deg) = scored.record(f).angle(joint) else { continue };
        let joint_score = joint_score_of(f, joint);
        let bin = libm::floor(angle_deg - valid_range.min).max(0.0) as usize;
        density_bins[bin.min(nbins - 1)] += 1;
        entries.push(GaugeEntry {
            frame_index: f.frame_index,
            angle_deg,
            risk_class: config.risk_class(joint.part(), joint_score),
            joint_score,
        });
    }
    GaugeSeries {
        joint,
        valid_range,
        score_range: (bands.min_score(), bands.max_score),
        colored: true,
        entries,
        density_bins,
    }
}
