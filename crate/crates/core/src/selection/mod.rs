//! Brushes and their evaluation against a scored dataset.
//!
//! Ranges and cells listed inside one brush are combined with union. Brushes
//! of a set are combined with intersection by default, or union on request.
//! Inactive brushes impose no constraint.

mod linked;

pub use linked::{linked_counts, GaugeOverlay, LinkedOverlay, LinkedViews, TableOverlay, TimelineOverlay, TimelineRequest};

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::joint::{BodySide, JointId};
use crate::reba::{ScoredDataset, ScoredFrame, TableId};

/// Half-width used when a range has zero width.
pub const DEGENERATE_TOLERANCE: f64 = 0.05;

/// A sorted set of frame indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FrameIdSet(Vec<u64>);

impl FrameIdSet {
    pub fn new() -> Self {
        FrameIdSet(Vec::new())
    }

    pub fn from_sorted(ids: Vec<u64>) -> Self {
        debug_assert!(ids.windows(2).all(|w| w[0] < w[1]));
        FrameIdSet(ids)
    }

    pub fn contains(&self, id: u64) -> bool {
        self.0.binary_search(&id).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn intersection(&self, other: &FrameIdSet) -> FrameIdSet {
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                core::cmp::Ordering::Less => i += 1,
                core::cmp::Ordering::Greater => j += 1,
                core::cmp::Ordering::Equal => {
                    out.push(self.0[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        FrameIdSet(out)
    }

    pub fn union(&self, other: &FrameIdSet) -> FrameIdSet {
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::with_capacity(self.0.len().max(other.0.len()));
        while i < self.0.len() || j < other.0.len() {
            let next = match (self.0.get(i), other.0.get(j)) {
                (Some(&a), Some(&b)) if a == b => {
                    i += 1;
                    j += 1;
                    a
                }
                (Some(&a), Some(&b)) if a < b => {
                    i += 1;
                    a
                }
                (Some(&a), None) => {
                    i += 1;
                    a
                }
                (_, Some(&b)) => {
                    j += 1;
                    b
                }
                (None, None) => unreachable!(),
            };
            out.push(next);
        }
        FrameIdSet(out)
    }
}

impl FromIterator<u64> for FrameIdSet {
    fn from_iter<I: IntoIterator<Item = u64>>(iter: I) -> Self {
        let set: BTreeSet<u64> = iter.into_iter().collect();
        FrameIdSet(set.into_iter().collect())
    }
}

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    /// Zero-width intervals match within [`DEGENERATE_TOLERANCE`].
    pub fn contains(&self, x: f64) -> bool {
        if self.lo == self.hi {
            (x - self.lo).abs() <= DEGENERATE_TOLERANCE
        } else {
            x >= self.lo && x <= self.hi
        }
    }
}

/// A heatmap cell, 0-based `(row, col)` as laid out by the table aggregate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BrushKind {
    /// Frames whose `attribute` score (a table dimension name) equals one of `bins`.
    ScoreBin { table: TableId, side: BodySide, level: usize, attribute: String, bins: Vec<u8> },
    HeatmapCell { table: TableId, side: BodySide, cells: Vec<Cell> },
    AngleRange { joint: JointId, ranges: Vec<Interval> },
    TimeRange { ranges: Vec<Interval> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Brush {
    pub id: String,
    #[serde(flatten)]
    pub kind: BrushKind,
    #[serde(default = "default_true")]
    pub active: bool,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Combine {
    #[default]
    Intersection,
    Union,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BrushSet {
    pub brushes: Vec<Brush>,
    #[serde(default)]
    pub combine: Combine,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SelectionError {
    #[error("brush `{brush}`: {reason}")]
    SchemaMismatch { brush: String, reason: String },
    #[error("duplicate brush id `{0}`")]
    DuplicateId(String),
}

/// Heatmap geometry of a table: rows follow the last dimension, columns the
/// row-major product of the others.
pub(crate) fn heatmap_shape(table: TableId) -> (usize, usize) {
    let dims = table.expected_dims();
    let (last, head) = dims.split_last().expect("tables have dimensions");
    (last.1, head.iter().map(|d| d.1).product())
}

/// 0-based heatmap cell of 1-based table inputs.
pub(crate) fn heatmap_cell(table: TableId, inputs: &[usize]) -> Cell {
    let dims = table.expected_dims();
    let (row_in, col_in) = inputs.split_last().expect("inputs match dims");
    let col = col_in.iter().zip(dims).fold(0, |acc, (&i, d)| acc * d.1 + (i - 1));
    Cell { row: row_in - 1, col }
}

/// Position of `attribute` within the table's horizontal or vertical hierarchy,
/// as a 1-based level.
pub(crate) fn attribute_level(table: TableId, attribute: &str) -> Option<(usize, usize)> {
    let dims = table.expected_dims();
    let dim = dims.iter().position(|d| d.0 == attribute)?;
    let level = if dim == dims.len() - 1 { 1 } else { dim + 1 };
    Some((dim, level))
}

impl Brush {
    pub fn validate(&self) -> Result<(), SelectionError> {
        let fail = |reason: String| SelectionError::SchemaMismatch { brush: self.id.clone(), reason };
        match &self.kind {
            BrushKind::ScoreBin { table, level, attribute, bins, .. } => {
                let (dim, expected_level) =
                    attribute_level(*table, attribute).ok_or_else(|| fail(alloc::format!("table {table} has no attribute `{attribute}`")))?;
                if *level != expected_level {
                    return Err(fail(alloc::format!("attribute `{attribute}` sits on level {expected_level}, not {level}")));
                }
                let card = table.expected_dims()[dim].1;
                if let Some(b) = bins.iter().find(|&&b| b == 0 || usize::from(b) > card) {
                    return Err(fail(alloc::format!("bin {b} outside [1, {card}]")));
                }
            }
            BrushKind::HeatmapCell { table, cells, .. } => {
                let (rows, cols) = heatmap_shape(*table);
                if let Some(c) = cells.iter().find(|c| c.row >= rows || c.col >= cols) {
                    return Err(fail(alloc::format!("cell ({}, {}) outside {rows}x{cols}", c.row, c.col)));
                }
            }
            BrushKind::AngleRange { ranges, .. } | BrushKind::TimeRange { ranges } => {
                if let Some(r) = ranges.iter().find(|r| r.lo.partial_cmp(&r.hi).is_none_or(|o| o.is_gt())) {
                    return Err(fail(alloc::format!("range [{}, {}] is not ordered", r.lo, r.hi)));
                }
            }
        }
        Ok(())
    }

    /// Whether one scored frame satisfies the brush, ignoring `active`.
    pub fn matches(&self, frame: &ScoredFrame, scored: &ScoredDataset) -> bool {
        match &self.kind {
            BrushKind::ScoreBin { table, side, attribute, bins, .. } => {
                let Some((dim, _)) = attribute_level(*table, attribute) else { return false };
                let v = frame.side(*side).table_inputs(*table)[dim];
                bins.iter().any(|&b| usize::from(b) == v)
            }
            BrushKind::HeatmapCell { table, side, cells } => {
                let cell = heatmap_cell(*table, &frame.side(*side).table_inputs(*table));
                cells.contains(&cell)
            }
            BrushKind::AngleRange { joint, ranges } => scored
                .record(frame)
                .angle(*joint)
                .is_some_and(|a| ranges.iter().any(|r| r.contains(a))),
            BrushKind::TimeRange { ranges } => ranges.iter().any(|r| r.contains(frame.timestamp_s)),
        }
    }
}

impl BrushSet {
    pub fn validate(&self) -> Result<(), SelectionError> {
        let mut ids = BTreeSet::new();
        for b in &self.brushes {
            if !ids.insert(b.id.as_str()) {
                return Err(SelectionError::DuplicateId(b.id.clone()));
            }
            b.validate()?;
        }
        Ok(())
    }
}

/// All included (scored) frames.
pub fn included_set(scored: &ScoredDataset) -> FrameIdSet {
    FrameIdSet(scored.frames().iter().map(|f| f.frame_index).collect())
}

pub fn evaluate_brush(brush: &Brush, scored: &ScoredDataset) -> Result<FrameIdSet, SelectionError> {
    brush.validate()?;
    if !brush.active {
        return Ok(included_set(scored));
    }
    Ok(FrameIdSet(
        scored
            .frames()
            .iter()
            .filter(|f| brush.matches(f, scored))
            .map(|f| f.frame_index)
            .collect(),
    ))
}

pub fn evaluate_composite(set: &BrushSet, scored: &ScoredDataset) -> Result<FrameIdSet, SelectionError> {
    set.validate()?;
    let mut acc: Option<FrameIdSet> = None;
    for b in set.brushes.iter().filter(|b| b.active) {
        let s = evaluate_brush(b, scored)?;
        acc = Some(match (acc, set.combine) {
            (None, _) => s,
            (Some(a), Combine::Intersection) => a.intersection(&s),
            (Some(a), Combine::Union) => a.union(&s),
        });
    }
    Ok(acc.unwrap_or_else(|| included_set(scored)))
}
