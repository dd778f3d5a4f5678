use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use super::RebaError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TableId {
    A,
    B,
    C,
}

impl TableId {
    pub const ALL: [TableId; 3] = [TableId::A, TableId::B, TableId::C];

    pub fn as_str(self) -> &'static str {
        match self {
            TableId::A => "A",
            TableId::B => "B",
            TableId::C => "C",
        }
    }

    /// Dimension names and cardinalities every asset must use for this table.
    pub fn expected_dims(self) -> &'static [(&'static str, usize)] {
        match self {
            TableId::A => &[("neck", 3), ("legs", 4), ("trunk", 5)],
            TableId::B => &[("lower_arm", 2), ("wrist", 3), ("upper_arm", 6)],
            TableId::C => &[("score_a", 12), ("score_b", 12)],
        }
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for TableId {
    type Err = RebaError;

    fn from_str(s: &str) -> Result<Self, RebaError> {
        match s {
            "A" | "a" => Ok(TableId::A),
            "B" | "b" => Ok(TableId::B),
            "C" | "c" => Ok(TableId::C),
            _ => Err(RebaError::UnknownTable(s.into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableDim {
    pub name: String,
    pub cardinality: usize,
}

/// A dense lookup table, row-major over `dims`, indexed from 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreTable {
    pub table_id: TableId,
    pub dims: Vec<TableDim>,
    pub cells: Vec<u8>,
    #[serde(default)]
    pub version: String,
}

impl ScoreTable {
    pub fn new(table_id: TableId, cells: Vec<u8>, version: impl Into<String>) -> Self {
        let dims = table_id
            .expected_dims()
            .iter()
            .map(|&(name, cardinality)| TableDim { name: name.into(), cardinality })
            .collect();
        ScoreTable { table_id, dims, cells, version: version.into() }
    }

    pub fn cardinalities(&self) -> Vec<usize> {
        self.dims.iter().map(|d| d.cardinality).collect()
    }

    /// Reads the cell at 1-based `indices`.
    pub fn lookup(&self, indices: &[usize]) -> Result<u8, RebaError> {
        if indices.len() != self.dims.len() {
            return Err(RebaError::IndexOutOfRange { table: self.table_id, dim: indices.len().min(self.dims.len()), index: 0 });
        }
        let mut offset = 0;
        for (dim, (&i, d)) in indices.iter().zip(&self.dims).enumerate() {
            if i == 0 || i > d.cardinality {
                return Err(RebaError::IndexOutOfRange { table: self.table_id, dim, index: i });
            }
            offset = offset * d.cardinality + (i - 1);
        }
        self.cells
            .get(offset)
            .copied()
            .ok_or(RebaError::IndexOutOfRange { table: self.table_id, dim: 0, index: indices[0] })
    }

    /// Calls `f` with every 1-based index tuple and its cell, in row-major order.
    pub fn for_each_cell(&self, mut f: impl FnMut(&[usize], u8)) {
        let card = self.cardinalities();
        let mut idx = vec![1usize; card.len()];
        for &cell in &self.cells {
            f(&idx, cell);
            for d in (0..card.len()).rev() {
                if idx[d] < card[d] {
                    idx[d] += 1;
                    break;
                }
                idx[d] = 1;
            }
        }
    }

    pub fn max_cell(&self) -> u8 {
        self.cells.iter().copied().max().unwrap_or(0)
    }

    pub fn min_cell(&self) -> u8 {
        self.cells.iter().copied().min().unwrap_or(0)
    }

    /// Every broken invariant: wrong shape, zero cells, and each adjacent
    /// pair where stepping one index up lowers the score.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let t = self.table_id;
        let expected = t.expected_dims();
        let shape_ok = self.dims.len() == expected.len()
            && self.dims.iter().zip(expected).all(|(d, &(name, c))| d.name == name && d.cardinality == c);
        if !shape_ok {
            out.push(format!("table {t}: dims must be {expected:?}"));
            return out;
        }
        let size: usize = self.cardinalities().iter().product();
        if self.cells.len() != size {
            out.push(format!("table {t}: {} cells, expected {size}", self.cells.len()));
            return out;
        }
        self.for_each_cell(|idx, v| {
            if v == 0 {
                out.push(format!("table {t} cell {idx:?}: score must be positive"));
            }
            for d in 0..idx.len() {
                if idx[d] < self.dims[d].cardinality {
                    let mut next = idx.to_vec();
                    next[d] += 1;
                    let w = self.lookup(&next).unwrap_or(u8::MAX);
                    if w < v {
                        out.push(format!(
                            "table {t} cell {idx:?} = {v} > cell {next:?} = {w} (not monotone along {})",
                            self.dims[d].name
                        ));
                    }
                }
            }
        });
        out
    }
}
