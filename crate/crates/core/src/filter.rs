//! Confidence and outlier filtering.
//!
//! Filtering never touches `frames`; it only grows `Dataset::excluded`.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::frame::Dataset;
use crate::joint::JointId;

/// Lower bound applied to the window MAD so constant series still flag spikes.
pub const MAD_FLOOR_DEG: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterPolicy {
    pub min_confidence: f64,
    pub hampel_window: usize,
    pub hampel_k: f64,
}

impl Default for FilterPolicy {
    fn default() -> Self {
        FilterPolicy { min_confidence: 0.5, hampel_window: 7, hampel_k: 5.0 }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FilterError {
    #[error("min_confidence {0} outside [0, 1]")]
    InvalidConfidence(f64),
    #[error("hampel window {0} must be odd and at least 3")]
    InvalidWindow(usize),
    #[error("hampel k {0} must be positive")]
    InvalidK(f64),
    #[error("hampel window {window} is larger than the dataset ({frames} frames)")]
    WindowLargerThanDataset { window: usize, frames: usize },
}

impl FilterPolicy {
    /// A policy that never excludes anything.
    pub fn permissive() -> Self {
        FilterPolicy { min_confidence: 0.0, hampel_window: 3, hampel_k: f64::INFINITY }
    }

    pub fn validate(&self) -> Result<(), FilterError> {
        if !(0.0..=1.0).contains(&self.min_confidence) {
            return Err(FilterError::InvalidConfidence(self.min_confidence));
        }
        if self.hampel_window < 3 || self.hampel_window.is_multiple_of(2) {
            return Err(FilterError::InvalidWindow(self.hampel_window));
        }
        // NaN fails this check too.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(self.hampel_k > 0.0) {
            return Err(FilterError::InvalidK(self.hampel_k));
        }
        Ok(())
    }
}

/// Flags low-confidence frames and Hampel outliers.
///
/// A frame is excluded when any recorded joint confidence is below
/// `min_confidence`, or when any joint angle deviates from its sliding-window
/// median by more than `hampel_k * max(MAD, 0.5°)`. The window keeps its full
/// size at the series ends by shifting inward. Already excluded frames stay
/// excluded. An empty dataset is returned unchanged.
pub fn filter_outliers(dataset: &Dataset, policy: &FilterPolicy) -> Result<Dataset, FilterError> {
    policy.validate()?;
    let n = dataset.frames.len();
    if n == 0 {
        return Ok(dataset.clone());
    }
    if policy.hampel_window > n {
        return Err(FilterError::WindowLargerThanDataset { window: policy.hampel_window, frames: n });
    }

    let mut excluded: BTreeSet<u64> = dataset.excluded.clone();
    for f in &dataset.frames {
        if f.confidence.values().any(|&c| c < policy.min_confidence) {
            excluded.insert(f.frame_index);
        }
    }

    let joints: BTreeSet<JointId> = dataset.frames.iter().flat_map(|f| f.angles.keys().copied()).collect();
    for joint in joints {
        // Frames lacking this joint are skipped; the series is the remaining samples.
        let series: Vec<(u64, f64)> = dataset
            .frames
            .iter()
            .filter_map(|f| f.angle(joint).map(|a| (f.frame_index, a)))
            .collect();
        for pos in hampel_outliers(&series.iter().map(|s| s.1).collect::<Vec<_>>(), policy.hampel_window, policy.hampel_k) {
            excluded.insert(series[pos].0);
        }
    }

    let mut out = dataset.clone();
    out.excluded = excluded;
    Ok(out)
}

/// Positions in `values` flagged by the Hampel test. Non-finite samples are always flagged.
pub fn hampel_outliers(values: &[f64], window: usize, k: f64) -> Vec<usize> {
    let n = values.len();
    if n < window {
        return Vec::new();
    }
    let half = window / 2;
    let mut buf = Vec::with_capacity(window);
    let mut out = Vec::new();
    for (i, &x) in values.iter().enumerate() {
        if !x.is_finite() {
            out.push(i);
            continue;
        }
        let start = i.saturating_sub(half).min(n - window);
        buf.clear();
        buf.extend(values[start..start + window].iter().copied().filter(|v| v.is_finite()));
        if buf.is_empty() {
            continue;
        }
        let med = median(&mut buf);
        for v in buf.iter_mut() {
            *v = (*v - med).abs();
        }
        let mad = median(&mut buf).max(MAD_FLOOR_DEG);
        if (x - med).abs() > k * mad {
            out.push(i);
        }
    }
    out
}

/// Median of a non-empty slice; even lengths average the two middle values.
pub(crate) fn median(values: &mut [f64]) -> f64 {
    values.sort_unstable_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}
