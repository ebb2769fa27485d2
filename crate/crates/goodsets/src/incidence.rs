//! Point-by-column 0/1 incidence matrices.
//!
//! Rows follow the point order of the set. Columns are (coordinate, symbol)
//! pairs, ordered by coordinate and then by symbol name, so the unknowns
//! `u_i(s)` and `u_j(s)` stay distinct even when a symbol is reused across
//! coordinates. On separated sets the columns are in bijection with the
//! plain symbols.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{ratio, RationalMatrix};
use crate::points::{PointSet, Symbol};

/// One unknown of the additive system: the value `u_i(symbol)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ColumnKey {
    /// 0-based coordinate index.
    pub coordinate: usize,
    pub symbol: Symbol,
}

impl fmt::Display for ColumnKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.coordinate + 1, self.symbol)
    }
}

#[derive(Clone, Debug)]
pub struct IncidenceMatrix {
    columns: Vec<ColumnKey>,
    index: HashMap<ColumnKey, usize>,
    /// Per row, the sorted column indices that hold a 1. Each row has
    /// exactly `dimension` entries, so every row sums to the dimension.
    row_cols: Vec<Vec<usize>>,
    dimension: usize,
}

impl IncidenceMatrix {
    pub fn build(s: &PointSet) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut keys: BTreeSet<ColumnKey> = BTreeSet::new();
        for p in s.points() {
            for (i, sym) in p.coords().iter().enumerate() {
                keys.insert(ColumnKey {
                    coordinate: i,
                    symbol: sym.clone(),
                });
            }
        }
        let columns: Vec<ColumnKey> = keys.into_iter().collect();
        let index: HashMap<ColumnKey, usize> = columns
            .iter()
            .enumerate()
            .map(|(i, k)| (k.clone(), i))
            .collect();
        let row_cols = s
            .points()
            .iter()
            .map(|p| {
                let mut cols: Vec<usize> = p
                    .coords()
                    .iter()
                    .enumerate()
                    .map(|(i, sym)| {
                        index[&ColumnKey {
                            coordinate: i,
                            symbol: sym.clone(),
                        }]
                    })
                    .collect();
                cols.sort_unstable();
                cols
            })
            .collect();
        Ok(IncidenceMatrix {
            columns,
            index,
            row_cols,
            dimension: s.dimension(),
        })
    }

    pub fn n_rows(&self) -> usize {
        self.row_cols.len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn columns(&self) -> &[ColumnKey] {
        &self.columns
    }

    pub fn column_index(&self, key: &ColumnKey) -> Option<usize> {
        self.index.get(key).copied()
    }

    /// Sorted column indices with a 1 in the given row.
    pub fn row_columns(&self, row: usize) -> &[usize] {
        &self.row_cols[row]
    }

    pub fn entry(&self, row: usize, col: usize) -> u8 {
        u8::from(self.row_cols[row].binary_search(&col).is_ok())
    }

    pub fn to_matrix(&self) -> RationalMatrix {
        self.matrix_without_columns(&BTreeSet::new())
    }

    /// The matrix over the columns NOT listed in `dropped`, column order
    /// preserved. Boundary checks work on exactly this column deletion.
    pub fn matrix_without_columns(&self, dropped: &BTreeSet<usize>) -> RationalMatrix {
        let kept: Vec<usize> = (0..self.n_cols())
            .filter(|c| !dropped.contains(c))
            .collect();
        let remap: HashMap<usize, usize> = kept.iter().enumerate().map(|(j, &c)| (c, j)).collect();
        let mut m = RationalMatrix::zeros(self.n_rows(), kept.len());
        for (r, cols) in self.row_cols.iter().enumerate() {
            for c in cols {
                if let Some(&j) = remap.get(c) {
                    m.set(r, j, ratio(1, 1));
                }
            }
        }
        m
    }
}
