use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::frame::AngleRange;
use crate::joint::JointId;
use crate::reba::{RiskClass, ScoredDataset};

use super::gauge::joint_score_of;

/// One decimated span of a joint's angle series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bucket {
    pub t_start: f64,
    pub t_end: f64,
    pub samples: usize,
    pub first_frame: u64,
    pub last_frame: u64,
    pub min_deg: f64,
    pub max_deg: f64,
    pub first_deg: f64,
    pub last_deg: f64,
    pub max_risk_class: RiskClass,
}

/// A band boundary drawn as a limit line. Boundaries of the minimal-score
/// band are non-risky, every other boundary is risky.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Limit {
    pub angle_deg: f64,
    pub risky: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DownsampledSeries {
    pub joint: JointId,
    pub buckets: Vec<Bucket>,
    pub limits: Vec<Limit>,
    /// Extent of the data in the window; each joint gets its own axis.
    pub value_range: AngleRange,
    pub valid_range: AngleRange,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TimelineError {
    #[error("window [{t0}, {t1}) is empty or inverted")]
    InvalidWindow { t0: f64, t1: f64 },
    #[error("max_points must be at least 2, got {0}")]
    InvalidMaxPoints(usize),
    #[error("no included frames in [{t0}, {t1})")]
    EmptyWindow { t0: f64, t1: f64 },
}

pub fn joint_limits(scored: &ScoredDataset, joint: JointId) -> Vec<Limit> {
    let bands = scored.config().angle_bands.joint(joint.part());
    let min = bands.min_score();
    bands
        .bands
        .windows(2)
        .map(|w| Limit { angle_deg: w[0].hi, risky: w[0].score != min && w[1].score != min })
        .collect()
}

/// Min-max decimation of each joint over the included frames in `[t0, t1)`.
///
/// Samples are split into consecutive groups of `ceil(n / max_points)`; when
/// `n <= max_points` every sample is its own bucket. Bucket spans tile the
/// window: the first starts at `t0`, each following one at its first
/// sample, and the last ends at `t1`.
pub fn timeline_window(
    scored: &ScoredDataset,
    joints: &[JointId],
    t0: f64,
    t1: f64,
    max_points: usize,
) -> Result<Vec<DownsampledSeries>, TimelineError> {
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(t0 < t1) {
        return Err(TimelineError::InvalidWindow { t0, t1 });
    }
    if max_points < 2 {
        return Err(TimelineError::InvalidMaxPoints(max_points));
    }
    let frames = scored.frames();
    let lo = frames.partition_point(|f| f.timestamp_s < t0);
    let hi = frames.partition_point(|f| f.timestamp_s < t1);
    let window = &frames[lo..hi];
    if window.is_empty() {
        return Err(TimelineError::EmptyWindow { t0, t1 });
    }

    let config = scored.config();
    let mut out = Vec::with_capacity(joints.len());
    for &joint in joints {
        let samples: Vec<(f64, u64, f64, RiskClass)> = window
            .iter()
            .filter_map(|f| {
                let a = scored.record(f).angle(joint)?;
                let class = config.risk_class(joint.part(), joint_score_of(f, joint));
                Some((f.timestamp_s, f.frame_index, a, class))
            })
            .collect();
        let n = samples.len();
        let per_bucket = n.div_ceil(max_points).max(1);
        let mut buckets: Vec<Bucket> = Vec::with_capacity(n.div_ceil(per_bucket));
        for chunk in samples.chunks(per_bucket) {
            let (mut min_deg, mut max_deg) = (f64::INFINITY, f64::NEG_INFINITY);
            let mut max_risk_class = RiskClass::Low;
            for s in chunk {
                min_deg = min_deg.min(s.2);
                max_deg = max_deg.max(s.2);
                max_risk_class = max_risk_class.max(s.3);
            }
            let t_start = if buckets.is_empty() { t0 } else { chunk[0].0 };
            if let Some(prev) = buckets.last_mut() {
                prev.t_end = t_start;
            }
            buckets.push(Bucket {
                t_start,
                t_end: t1,
                samples: chunk.len(),
                first_frame: chunk[0].1,
                last_frame: chunk[chunk.len() - 1].1,
                min_deg,
                max_deg,
                first_deg: chunk[0].2,
                last_deg: chunk[chunk.len() - 1].2,
                max_risk_class,
            });
        }
        let value_range = buckets.iter().fold(AngleRange::new(f64::INFINITY, f64::NEG_INFINITY), |r, b| {
            AngleRange::new(r.min.min(b.min_deg), r.max.max(b.max_deg))
        });
        out.push(DownsampledSeries {
            joint,
            buckets,
            limits: joint_limits(scored, joint),
            value_range,
            valid_range: config.angle_bands.joint(joint.part()).valid_range(),
        });
    }
    Ok(out)
}
