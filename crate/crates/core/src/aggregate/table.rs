use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::joint::BodySide;
use crate::reba::{ScoredDataset, TableId};
use crate::selection::{heatmap_cell, heatmap_shape, FrameIdSet};

use super::in_scope;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Horizontal,
    Vertical,
}

/// Which bin of the level above a histogram hangs under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParentRef {
    pub histogram: usize,
    pub bin: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Histogram {
    pub parent: Option<ParentRef>,
    /// Counts per score value, ascending from 1.
    pub bin_counts: Vec<u64>,
}

impl Histogram {
    pub fn total(&self) -> u64 {
        self.bin_counts.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistogramLevel {
    pub attribute: String,
    pub histograms: Vec<Histogram>,
}

/// Marginal histograms of one table orientation. Level `k + 1` holds one
/// histogram per bin of level `k`, in flattened bin order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HierarchicalHistogram {
    pub orientation: Orientation,
    pub levels: Vec<HistogramLevel>,
}

impl HierarchicalHistogram {
    fn new(orientation: Orientation, dims: &[(&str, usize)]) -> Self {
        let mut levels = Vec::with_capacity(dims.len());
        let mut parent_bins = 1;
        let mut parent_card = 0;
        for (k, &(name, card)) in dims.iter().enumerate() {
            let histograms = (0..parent_bins)
                .map(|h| Histogram {
                    parent: (k > 0).then(|| ParentRef { histogram: h / parent_card, bin: h % parent_card }),
                    bin_counts: vec![0; card],
                })
                .collect();
            levels.push(HistogramLevel { attribute: name.into(), histograms });
            parent_bins *= card;
            parent_card = card;
        }
        HierarchicalHistogram { orientation, levels }
    }

    fn add(&mut self, inputs: &[usize]) {
        let mut flat = 0;
        for (level, &i) in self.levels.iter_mut().zip(inputs) {
            let hist = &mut level.histograms[flat];
            let card = hist.bin_counts.len();
            hist.bin_counts[i - 1] += 1;
            flat = flat * card + (i - 1);
        }
    }

    /// Sum of all bins of all histograms on `level` (0-based).
    pub fn level_total(&self, level: usize) -> u64 {
        self.levels[level].histograms.iter().map(Histogram::total).sum()
    }
}

/// Frequency grid over a table's cells, next to the cells' own scores.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Heatmap {
    pub rows: usize,
    pub cols: usize,
    /// Row-major.
    pub cell_counts: Vec<Vec<u64>>,
    pub cell_scores: Vec<Vec<u8>>,
}

impl Heatmap {
    pub fn total(&self) -> u64 {
        self.cell_counts.iter().flatten().sum()
    }
}

/// Everything an augmented score table displays.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableAggregate {
    pub table: TableId,
    pub side: BodySide,
    /// Frames counted.
    pub n: u64,
    pub horizontal: HierarchicalHistogram,
    pub vertical: HierarchicalHistogram,
    pub heatmap: Heatmap,
}

/// Histograms and heatmap of `table` for `side`, over the included frames
/// (intersected with `selection` when given).
///
/// The last table dimension is vertical (heatmap rows); the others form the
/// horizontal hierarchy and the heatmap columns in row-major order.
pub fn table_aggregate(
    scored: &ScoredDataset,
    side: BodySide,
    table: TableId,
    selection: Option<&FrameIdSet>,
) -> TableAggregate {
    let dims = table.expected_dims();
    let (vertical_dim, horizontal_dims) = dims.split_last().expect("tables have dimensions");
    let mut horizontal = HierarchicalHistogram::new(Orientation::Horizontal, horizontal_dims);
    let mut vertical = HierarchicalHistogram::new(Orientation::Vertical, core::slice::from_ref(vertical_dim));

    let (rows, cols) = heatmap_shape(table);
    let lookup = scored.config().tables.get(table);
    let mut cell_counts = vec![vec![0u64; cols]; rows];
    let mut cell_scores = vec![vec![0u8; cols]; rows];
    lookup.for_each_cell(|idx, v| {
        let c = heatmap_cell(table, idx);
        cell_scores[c.row][c.col] = v;
    });

    let mut n = 0;
    for f in scored.frames().iter().filter(|f| in_scope(f.frame_index, selection)) {
        let inputs = f.side(side).table_inputs(table);
        let (row_in, col_in) = inputs.split_last().expect("inputs match dims");
        horizontal.add(col_in);
        vertical.add(core::slice::from_ref(row_in));
        let c = heatmap_cell(table, &inputs);
        cell_counts[c.row][c.col] += 1;
        n += 1;
    }

    TableAggregate {
        table,
        side,
        n,
        horizontal,
        vertical,
        heatmap: Heatmap { rows, cols, cell_counts, cell_scores },
    }
}
