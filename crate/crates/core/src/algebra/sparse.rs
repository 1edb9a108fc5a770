//! Sparse exact row reduction over ℚ(i).

use std::collections::BTreeMap;

use super::crational::CRational;

pub type SparseRow = BTreeMap<usize, CRational>;

/// Reduced row-echelon form built incrementally: every pivot row has a unit
/// entry at its pivot column and zeros at all other pivot columns.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    ncols: usize,
    pivots: BTreeMap<usize, SparseRow>,
}

fn axpy(row: &mut SparseRow, f: &CRational, other: &SparseRow) {
    for (c, v) in other {
        let t = f * v;
        match row.get_mut(c) {
            Some(x) => {
                *x += &t;
                if x.is_zero() {
                    row.remove(c);
                }
            }
            None => {
                if !t.is_zero() {
                    row.insert(*c, t);
                }
            }
        }
    }
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Echelon { ncols, pivots: BTreeMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn pivot_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivots.keys().copied()
    }

    /// Adds a row; returns whether it increased the rank.
    pub fn push(&mut self, mut row: SparseRow) -> bool {
        row.retain(|_, v| !v.is_zero());
        let hits: Vec<usize> = row.keys().filter(|c| self.pivots.contains_key(c)).copied().collect();
        for c in hits {
            let Some(f) = row.get(&c).cloned() else { continue };
            axpy(&mut row, &-f, &self.pivots[&c]);
        }
        let Some((&lead, lead_val)) = row.iter().next() else {
            return false;
        };
        let inv = lead_val.inv().expect("nonzero");
        for v in row.values_mut() {
            *v = &*v * &inv;
        }
        for prow in self.pivots.values_mut() {
            if let Some(f) = prow.get(&lead).cloned() {
                axpy(prow, &-f, &row);
            }
        }
        self.pivots.insert(lead, row);
        true
    }

    /// Basis of `{v : M v = 0}`, one vector per free column `f`, with
    /// `v[f] = 1` and `f` the largest index in the vector's support.
    pub fn nullspace(&self) -> Vec<SparseRow> {
        (0..self.ncols)
            .filter(|c| !self.pivots.contains_key(c))
            .map(|free| {
                let mut v = SparseRow::new();
                v.insert(free, CRational::one());
                for (&p, prow) in &self.pivots {
                    if let Some(x) = prow.get(&free) {
                        v.insert(p, -x);
                    }
                }
                v
            })
            .collect()
    }
}

/// Exact rank of a set of sparse rows.
pub fn sparse_rank<'a>(ncols: usize, rows: impl IntoIterator<Item = &'a SparseRow>) -> usize {
    let mut e = Echelon::new(ncols);
    for r in rows {
        e.push(r.clone());
    }
    e.rank()
}
