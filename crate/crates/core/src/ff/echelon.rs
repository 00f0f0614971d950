//! Incremental echelon forms for rank tests and coordinate tracking.

use super::field::Field;
use super::matrix::{nullspace_from_rref, Matrix};

/// A growing set of linearly independent rows kept in semi-reduced echelon form:
/// each stored row has a leading 1 at its pivot and zeros at all earlier pivots.
#[derive(Clone, Debug)]
pub struct RowEchelon {
    field: Field,
    width: usize,
    rows: Vec<Vec<u8>>,
    pivots: Vec<usize>,
}

impl RowEchelon {
    pub fn new(field: &Field, width: usize) -> Self {
        RowEchelon { field: field.clone(), width, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn from_matrix_rows(m: &Matrix) -> Self {
        let mut e = RowEchelon::new(m.field(), m.cols());
        for r in 0..m.rows() {
            e.insert(m.row(r).to_vec());
        }
        e
    }

    pub fn width(&self) -> usize {
        self.width
    }
    pub fn rank(&self) -> usize {
        self.rows.len()
    }
    pub fn is_full(&self) -> bool {
        self.rows.len() == self.width
    }

    /// Reduce `v` against the stored rows; afterwards `v` is zero at every pivot.
    pub fn reduce(&self, v: &mut [u8]) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let c = v[p];
            if c != 0 {
                self.field.axpy(v, self.field.neg(c), row);
            }
        }
    }

    pub fn contains(&self, v: &[u8]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|&x| x == 0)
    }

    /// Insert a vector; returns whether it increased the rank.
    pub fn insert(&mut self, mut v: Vec<u8>) -> bool {
        assert_eq!(v.len(), self.width);
        self.reduce(&mut v);
        self.push_reduced(v)
    }

    fn push_reduced(&mut self, mut v: Vec<u8>) -> bool {
        let Some(p) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let lead = v[p];
        if lead != 1 {
            self.field.scale(&mut v, self.field.inv(lead));
        }
        self.rows.push(v);
        self.pivots.push(p);
        true
    }

    /// By how much the rank would grow if all `vs` were inserted; does not mutate.
    pub fn rank_increase(&self, vs: &[Vec<u8>]) -> usize {
        let mut extra = RowEchelon::new(&self.field, self.width);
        for v in vs {
            let mut w = v.clone();
            self.reduce(&mut w);
            extra.insert(w);
        }
        extra.rank()
    }

    /// Insert all vectors, returning the number that were independent.
    pub fn extend<I: IntoIterator<Item = Vec<u8>>>(&mut self, vs: I) -> usize {
        vs.into_iter().map(|v| self.insert(v) as usize).sum()
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    /// Canonical reduced row echelon form of the span.
    pub fn to_rref(&self) -> (Matrix, Vec<usize>) {
        let m = Matrix::from_rows(&self.field, self.width, &self.rows);
        let r = m.rref();
        (r.reduced, r.pivots)
    }

    /// Right kernel of the stored rows, as columns.
    pub fn nullspace(&self) -> Matrix {
        let (reduced, pivots) = self.to_rref();
        nullspace_from_rref(&reduced, &pivots)
    }
}

/// Outcome of offering a vector to a [`TrackedEchelon`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Offer {
    /// The vector became basis vector number `index`.
    New(usize),
    /// The vector equals `sum coords[t] * basis[t]` over the basis so far.
    Dependent(Vec<u8>),
}

/// Echelon form that also records each reduced row as a combination of the
/// original (unreduced) basis vectors, giving coordinates of dependent vectors.
#[derive(Clone, Debug)]
pub struct TrackedEchelon {
    field: Field,
    width: usize,
    rows: Vec<Vec<u8>>,
    combs: Vec<Vec<u8>>,
    pivots: Vec<usize>,
}

impl TrackedEchelon {
    pub fn new(field: &Field, width: usize) -> Self {
        TrackedEchelon { field: field.clone(), width, rows: Vec::new(), combs: Vec::new(), pivots: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
    pub fn is_full(&self) -> bool {
        self.rows.len() == self.width
    }

    pub fn offer(&mut self, v: &[u8]) -> Offer {
        assert_eq!(v.len(), self.width);
        let f = &self.field;
        let mut w = v.to_vec();
        // combinations have length `width` (the maximum basis size)
        let mut comb = vec![0u8; self.width];
        for ((row, c_row), &p) in self.rows.iter().zip(&self.combs).zip(&self.pivots) {
            let c = w[p];
            if c != 0 {
                f.axpy(&mut w, f.neg(c), row);
                f.axpy(&mut comb, c, c_row);
            }
        }
        match w.iter().position(|&x| x != 0) {
            None => {
                comb.truncate(self.rows.len());
                Offer::Dependent(comb)
            }
            Some(p) => {
                let index = self.rows.len();
                let inv = f.inv(w[p]);
                // reduced row = (v - sum comb_t w_t) / lead
                let mut new_comb: Vec<u8> = comb.iter().map(|&c| f.neg(c)).collect();
                new_comb[index] = f.add(new_comb[index], 1);
                f.scale(&mut new_comb, inv);
                f.scale(&mut w, inv);
                self.rows.push(w);
                self.combs.push(new_comb);
                self.pivots.push(p);
                Offer::New(index)
            }
        }
    }
}
