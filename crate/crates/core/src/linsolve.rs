//! Sparse exact linear systems `A x = b` with a rational matrix and an
//! affine-parametric right-hand side, reduced to row echelon form.
//!
//! Pivots are taken at the first (lowest-index) nonzero column of each row,
//! so with columns listed in canonical basis order the particular solution
//! is reproducible. Free columns are set to zero.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::exactmath::{ParamExpr, Rational};

pub type SparseRow = BTreeMap<usize, Rational>;

#[derive(Clone, Debug, Default)]
pub struct LinearSystem {
    ncols: usize,
    rows: Vec<(SparseRow, ParamExpr)>,
}

#[derive(Clone, Debug)]
pub struct PivotRow {
    pub col: usize,
    /// Entries in free columns (the pivot entry is 1 and omitted).
    pub free: SparseRow,
    pub rhs: ParamExpr,
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub ncols: usize,
    pub pivots: Vec<PivotRow>,
    pub free: Vec<usize>,
    /// Affine expressions that must vanish for the system to be consistent.
    pub conditions: Vec<ParamExpr>,
}

impl LinearSystem {
    pub fn new(ncols: usize) -> Self {
        LinearSystem { ncols, rows: Vec::new() }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn push(&mut self, row: SparseRow, rhs: ParamExpr) {
        debug_assert!(row.keys().all(|&c| c < self.ncols));
        self.rows.push((row, rhs));
    }

    pub fn solve(self) -> Solution {
        // pivot column -> (row without pivot entry, rhs), kept fully reduced
        let mut pivots: BTreeMap<usize, (SparseRow, ParamExpr)> = BTreeMap::new();
        let mut conditions = Vec::new();
        for (mut row, mut rhs) in self.rows {
            row.retain(|_, v| !v.is_zero());
            loop {
                let hit = row.keys().find(|c| pivots.contains_key(c)).copied();
                let Some(col) = hit else { break };
                let factor = row.remove(&col).expect("present");
                let (prow, prhs) = &pivots[&col];
                axpy(&mut row, &-&factor, prow);
                rhs -= prhs.scale(&factor);
            }
            let Some((&col, lead)) = row.iter().next() else {
                if !rhs.is_zero() {
                    conditions.push(rhs);
                }
                continue;
            };
            let inv = lead.recip();
            row.remove(&col);
            for v in row.values_mut() {
                *v *= &inv;
            }
            let rhs = rhs.scale(&inv);
            for (other, orhs) in pivots.values_mut() {
                if let Some(f) = other.remove(&col) {
                    axpy(other, &-&f, &row);
                    *orhs -= rhs.scale(&f);
                }
            }
            pivots.insert(col, (row, rhs));
        }
        let free = (0..self.ncols).filter(|c| !pivots.contains_key(c)).collect();
        let pivots = pivots
            .into_iter()
            .map(|(col, (free, rhs))| PivotRow { col, free, rhs })
            .collect();
        Solution { ncols: self.ncols, pivots, free, conditions }
    }
}

fn axpy(row: &mut SparseRow, a: &Rational, other: &SparseRow) {
    for (c, v) in other {
        let entry = row.entry(*c).or_insert_with(Rational::zero);
        *entry += a * v;
        if entry.is_zero() {
            row.remove(c);
        }
    }
}

impl Solution {
    pub fn is_consistent(&self) -> bool {
        self.conditions.is_empty()
    }

    pub fn is_unique(&self) -> bool {
        self.free.is_empty()
    }

    /// Particular solution with every free column set to zero.
    pub fn particular(&self) -> Vec<ParamExpr> {
        let mut x = vec![ParamExpr::zero(); self.ncols];
        for p in &self.pivots {
            x[p.col] = p.rhs.clone();
        }
        x
    }

    /// General solution, with free column `c` represented by `names[c]`.
    pub fn general(&self, names: &[String]) -> Vec<ParamExpr> {
        let mut x = vec![ParamExpr::zero(); self.ncols];
        for &c in &self.free {
            x[c] = ParamExpr::param(names[c].clone());
        }
        for p in &self.pivots {
            let mut v = p.rhs.clone();
            for (c, a) in &p.free {
                v -= ParamExpr::param(names[*c].clone()).scale(a);
            }
            x[p.col] = v;
        }
        x
    }

    /// Pivot columns whose value does not involve any free column.
    pub fn determined(&self) -> impl Iterator<Item = (usize, &ParamExpr)> {
        self.pivots.iter().filter(|p| p.free.is_empty()).map(|p| (p.col, &p.rhs))
    }
}

/// Turns affine relations `a . params + c = 0` into a system over the named
/// parameters; returns the system and the column names.
pub fn parameter_system(relations: &[ParamExpr], order: &[String]) -> (LinearSystem, Vec<String>) {
    let mut names: Vec<String> = order.to_vec();
    for r in relations {
        for p in r.params() {
            if !names.iter().any(|n| n == p) {
                names.push(p.to_string());
            }
        }
    }
    let mut sys = LinearSystem::new(names.len());
    for r in relations {
        let row: SparseRow = r
            .terms()
            .iter()
            .map(|(n, c)| (names.iter().position(|m| m == n).expect("collected"), c.clone()))
            .collect();
        sys.push(row, ParamExpr::from(-r.constant().clone()));
    }
    (sys, names)
}
