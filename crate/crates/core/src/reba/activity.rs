use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::frame::Dataset;
use crate::joint::{BodySide, JointId};

use super::RebaConfig;

/// Thresholds of the activity heuristic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActivityConfig {
    /// A joint held within `±static_tolerance_deg` for longer than this is static.
    pub static_hold_s: f64,
    pub static_tolerance_deg: f64,
    /// Trailing window for counting band-boundary crossings.
    pub repeat_window_s: f64,
    /// More crossings of one boundary than this inside the window is repetition.
    pub repeat_max_crossings: u32,
    /// Angle change between consecutive included frames above this is rapid.
    pub rapid_change_deg: f64,
}

impl Default for ActivityConfig {
    fn default() -> Self {
        ActivityConfig {
            static_hold_s: 60.0,
            static_tolerance_deg: 5.0,
            repeat_window_s: 60.0,
            repeat_max_crossings: 4,
            rapid_change_deg: 30.0,
        }
    }
}

/// Which activity triggers fire for a frame on one side.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActivityContext {
    pub static_posture: bool,
    pub repeated_action: bool,
    pub rapid_change: bool,
}

impl ActivityContext {
    pub fn score(&self) -> u8 {
        u8::from(self.static_posture) + u8::from(self.repeated_action) + u8::from(self.rapid_change)
    }
}

/// Activity triggers for every frame of `dataset`, aligned with `dataset.frames`.
///
/// Only included frames take part; excluded frames get an empty context.
/// For each of the side's six joints:
/// - static: the longest run ending at the frame whose angle spread stays
///   within twice the tolerance lasts longer than `static_hold_s`;
/// - repeated: some band boundary was crossed more than
///   `repeat_max_crossings` times in the trailing `repeat_window_s`;
/// - rapid: the angle moved more than `rapid_change_deg` since the previous
///   included frame.
pub fn activity_contexts(dataset: &Dataset, side: BodySide, config: &RebaConfig) -> Vec<ActivityContext> {
    let act = &config.activity;
    let mut out = vec![ActivityContext::default(); dataset.frames.len()];
    for joint in JointId::for_side(side) {
        let bands = config.angle_bands.joint(joint.part());
        let samples: Vec<(usize, f64, f64)> = dataset
            .frames
            .iter()
            .enumerate()
            .filter(|(_, f)| !dataset.is_excluded(f.frame_index))
            .filter_map(|(pos, f)| f.angle(joint).filter(|a| a.is_finite()).map(|a| (pos, f.timestamp_s, a)))
            .collect();

        // Monotone deques of sample positions for the running max and min.
        let mut maxq: VecDeque<usize> = VecDeque::new();
        let mut minq: VecDeque<usize> = VecDeque::new();
        let mut left = 0;
        let spread = 2.0 * act.static_tolerance_deg;

        let boundaries = bands.bands.len().saturating_sub(1);
        let mut crossings: Vec<VecDeque<f64>> = vec![VecDeque::new(); boundaries];
        let mut prev: Option<(f64, Option<usize>)> = None;

        for (i, &(pos, t, a)) in samples.iter().enumerate() {
            while maxq.back().is_some_and(|&j| samples[j].2 <= a) {
                maxq.pop_back();
            }
            maxq.push_back(i);
            while minq.back().is_some_and(|&j| samples[j].2 >= a) {
                minq.pop_back();
            }
            minq.push_back(i);
            while samples[maxq[0]].2 - samples[minq[0]].2 > spread {
                left += 1;
                while maxq[0] < left {
                    maxq.pop_front();
                }
                while minq[0] < left {
                    minq.pop_front();
                }
            }
            if t - samples[left].1 > act.static_hold_s {
                out[pos].static_posture = true;
            }

            let band = bands.band_index(a);
            if let Some((pa, pband)) = prev {
                if (a - pa).abs() > act.rapid_change_deg {
                    out[pos].rapid_change = true;
                }
                if let (Some(p), Some(b)) = (pband, band) {
                    for q in &mut crossings[p.min(b)..p.max(b)] {
                        q.push_back(t);
                    }
                }
            }
            prev = Some((a, band));
            for q in crossings.iter_mut() {
                while q.front().is_some_and(|&ct| ct <= t - act.repeat_window_s) {
                    q.pop_front();
                }
            }
            if crossings.iter().any(|q| q.len() > act.repeat_max_crossings as usize) {
                out[pos].repeated_action = true;
            }
        }
    }
    out
}
