//! Exact rank computation over the coefficient field by incremental sparse
//! row echelon reduction.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::coef::Coef;

/// A sparse vector: column index to nonzero entry.
pub type SparseRow = BTreeMap<usize, Coef>;

/// Row echelon basis built one vector at a time.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    pivots: BTreeMap<usize, SparseRow>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Reduces `row` against the current basis; returns the remainder.
    pub fn reduce(&self, mut row: SparseRow) -> SparseRow {
        row.retain(|_, c| !c.is_zero());
        // pivot rows vanish in every other pivot column, so one pass suffices
        let cols: Vec<usize> = row.keys().filter(|k| self.pivots.contains_key(k)).copied().collect();
        for col in cols {
            let Some(entry) = row.get(&col).cloned() else { continue };
            let piv = &self.pivots[&col];
            let factor = &entry / &piv[&col];
            axpy(&mut row, &factor, piv);
        }
        row
    }

    /// Adds a vector; returns true when it was independent of the basis.
    pub fn insert(&mut self, row: SparseRow) -> bool {
        let r = self.reduce(row);
        // prefer a rational pivot to keep entries small
        let col = r
            .iter()
            .find(|(_, c)| c.is_constant())
            .or_else(|| r.iter().next())
            .map(|(k, _)| *k);
        let Some(c) = col else { return false };
        for piv in self.pivots.values_mut() {
            if let Some(entry) = piv.get(&c).cloned() {
                let factor = &entry / &r[&c];
                axpy(piv, &factor, &r);
            }
        }
        self.pivots.insert(c, r);
        true
    }

    pub fn contains(&self, row: SparseRow) -> bool {
        self.reduce(row).is_empty()
    }
}

/// `row -= factor * other`, dropping entries that cancel.
fn axpy(row: &mut SparseRow, factor: &Coef, other: &SparseRow) {
    for (k, v) in other {
        let nv = &row.get(k).cloned().unwrap_or_else(Coef::zero) - &(factor * v);
        if nv.is_zero() {
            row.remove(k);
        } else {
            row.insert(*k, nv);
        }
    }
}

/// Rank of the span of the given vectors.
pub fn rank(rows: impl IntoIterator<Item = SparseRow>) -> usize {
    let mut e = Echelon::new();
    for r in rows {
        e.insert(r);
    }
    e.rank()
}
