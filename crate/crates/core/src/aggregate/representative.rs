use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::joint::BodySide;
use crate::reba::{ScoredDataset, TableId};

/// One representative frame per score group of `table`.
///
/// Groups are keyed by the table's cell score for A and B and by the grand
/// score for C. Among the group members that have an image, the one at the
/// median timestamp is chosen (lower middle for even counts, ties broken by
/// lower frame index). Groups without any image map to `None`.
pub fn representative_frames(scored: &ScoredDataset, table: TableId, side: BodySide) -> BTreeMap<u8, Option<u64>> {
    let mut groups: BTreeMap<u8, Vec<(f64, u64)>> = BTreeMap::new();
    for f in scored.frames() {
        let members = groups.entry(f.side(side).group_score(table)).or_default();
        if scored.record(f).image_ref.is_some() {
            members.push((f.timestamp_s, f.frame_index));
        }
    }
    groups
        .into_iter()
        .map(|(score, mut members)| {
            members.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let pick = (!members.is_empty()).then(|| members[(members.len() - 1) / 2].1);
            (score, pick)
        })
        .collect()
}
