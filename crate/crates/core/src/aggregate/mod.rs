//! Aggregated structures behind the views: augmented score tables, joint
//! gauges, decimated timelines and representative frames.
//!
//! All functions only count scored (included) frames; an optional selection
//! narrows that scope further.

mod gauge;
mod representative;
mod table;
mod timeline;

pub use gauge::{gauge_distribution, GaugeEntry, GaugeSeries};
pub use representative::representative_frames;
pub use table::{
    table_aggregate, Heatmap, HierarchicalHistogram, Histogram, HistogramLevel, Orientation, ParentRef, TableAggregate,
};
pub use timeline::{joint_limits, timeline_window, Bucket, DownsampledSeries, Limit, TimelineError};

use crate::selection::FrameIdSet;

fn in_scope(frame_index: u64, selection: Option<&FrameIdSet>) -> bool {
    selection.is_none_or(|s| s.contains(frame_index))
}
