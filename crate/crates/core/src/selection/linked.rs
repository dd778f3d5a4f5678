use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::aggregate::{gauge_distribution, table_aggregate, timeline_window, TableAggregate, TimelineError};
use crate::joint::{BodySide, JointId};
use crate::reba::{ScoredDataset, TableId};

use super::FrameIdSet;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimelineRequest {
    pub joints: Vec<JointId>,
    pub t0: f64,
    pub t1: f64,
    pub max_points: usize,
}

/// The views an overlay is computed for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkedViews {
    pub tables: Vec<(TableId, BodySide)>,
    pub gauges: Vec<JointId>,
    pub timeline: Option<TimelineRequest>,
}

impl LinkedViews {
    /// All six tables and all ten gauges, no timeline.
    pub fn all() -> Self {
        let tables = BodySide::BOTH
            .into_iter()
            .flat_map(|s| TableId::ALL.into_iter().map(move |t| (t, s)))
            .collect();
        LinkedViews { tables, gauges: JointId::ALL.to_vec(), timeline: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableOverlay {
    pub full: TableAggregate,
    pub selected: TableAggregate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaugeOverlay {
    pub joint: JointId,
    pub full_count: u64,
    pub selected_count: u64,
    pub full_density: Vec<u64>,
    pub selected_density: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimelineOverlay {
    pub joint: JointId,
    pub bucket_counts: Vec<u64>,
    pub selected_counts: Vec<u64>,
}

/// Full-scope and selected-scope aggregates side by side for every view.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkedOverlay {
    pub included: u64,
    pub selected: u64,
    pub tables: Vec<TableOverlay>,
    pub gauges: Vec<GaugeOverlay>,
    pub timeline: Vec<TimelineOverlay>,
}

pub fn linked_counts(
    selection: &FrameIdSet,
    scored: &ScoredDataset,
    views: &LinkedViews,
) -> Result<LinkedOverlay, TimelineError> {
    let selected = scored.frames().iter().filter(|f| selection.contains(f.frame_index)).count() as u64;
    let tables = views
        .tables
        .iter()
        .map(|&(t, s)| TableOverlay {
            full: table_aggregate(scored, s, t, None),
            selected: table_aggregate(scored, s, t, Some(selection)),
        })
        .collect();
    let gauges = views
        .gauges
        .iter()
        .map(|&j| {
            let full = gauge_distribution(scored, j, None);
            let sel = gauge_distribution(scored, j, Some(selection));
            GaugeOverlay {
                joint: j,
                full_count: full.entries.len() as u64,
                selected_count: sel.entries.len() as u64,
                full_density: full.density_bins,
                selected_density: sel.density_bins,
            }
        })
        .collect();
    let timeline = match &views.timeline {
        None => Vec::new(),
        Some(req) => timeline_window(scored, &req.joints, req.t0, req.t1, req.max_points)?
            .into_iter()
            .map(|series| {
                let (bucket_counts, selected_counts) = series
                    .buckets
                    .iter()
                    .map(|b| {
                        let ids = selection.as_slice();
                        let lo = ids.partition_point(|&i| i < b.first_frame);
                        let hi = ids.partition_point(|&i| i <= b.last_frame);
                        let hits = ids[lo..hi].iter().filter(|&&i| scored.get(i).is_some()).count();
                        (b.samples as u64, hits as u64)
                    })
                    .unzip();
                TimelineOverlay { joint: series.joint, bucket_counts, selected_counts }
            })
            .collect(),
    };
    Ok(LinkedOverlay { included: scored.len() as u64, selected, tables, gauges, timeline })
}
