use std::fmt;

use thiserror::Error;

use super::field::{Field, Kind};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrices over different fields")]
    FieldMismatch,
}

/// Dense matrix over a finite field, row-major, entries stored as field encodings.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} over {}", self.rows, self.cols, self.field)?;
        for r in 0..self.rows.min(24) {
            writeln!(f, "  {:?}", &self.row(r)[..self.cols.min(32)])?;
        }
        Ok(())
    }
}

impl std::hash::Hash for Matrix {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.rows.hash(state);
        self.cols.hash(state);
        self.data.hash(state);
    }
}

/// Result of Gauss-Jordan elimination: the reduced row echelon form and its pivot columns.
#[derive(Clone, Debug)]
pub struct Rref {
    pub reduced: Matrix,
    pub pivots: Vec<usize>,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

const PAR_THRESHOLD: usize = 1 << 16;

impl Matrix {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Matrix {
        Matrix { field: field.clone(), rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: &Field, n: usize) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_data(field: &Field, rows: usize, cols: usize, data: Vec<u8>) -> Matrix {
        assert_eq!(data.len(), rows * cols);
        debug_assert!(data.iter().all(|&x| (x as usize) < field.order()));
        Matrix { field: field.clone(), rows, cols, data }
    }

    pub fn from_fn(field: &Field, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> u8) -> Matrix {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix::from_data(field, rows, cols, data)
    }

    /// Rows of integers, each reduced into the prime subfield.
    pub fn from_ints<R: AsRef<[i64]>>(field: &Field, rows: &[R]) -> Matrix {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.as_ref().len(), cols, "ragged rows");
            data.extend(r.as_ref().iter().map(|&v| field.from_int(v)));
        }
        Matrix::from_data(field, rows.len(), cols, data)
    }

    /// Matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(field: &Field, rows: usize, columns: &[Vec<u8>]) -> Matrix {
        let mut m = Matrix::zeros(field, rows, columns.len());
        for (c, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (r, &v) in col.iter().enumerate() {
                m.data[r * m.cols + c] = v;
            }
        }
        m
    }

    pub fn from_rows(field: &Field, cols: usize, rows: &[Vec<u8>]) -> Matrix {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols);
            data.extend_from_slice(r);
        }
        Matrix::from_data(field, rows.len(), cols, data)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }
    pub fn data(&self) -> &[u8] {
        &self.data
    }
    pub fn into_data(self) -> Vec<u8> {
        self.data
    }
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.data[r * self.cols + c]
    }
    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u8) {
        self.data[r * self.cols + c] = v;
    }
    #[inline]
    pub fn row(&self, r: usize) -> &[u8] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }
    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [u8] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }
    pub fn column(&self, c: usize) -> Vec<u8> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|r| (0..self.cols).all(|c| self.get(r, c) == u8::from(r == c)))
    }

    pub fn transpose(&self) -> Matrix {
        const TILE: usize = 32;
        let mut t = Matrix::zeros(&self.field, self.cols, self.rows);
        for r0 in (0..self.rows).step_by(TILE) {
            for c0 in (0..self.cols).step_by(TILE) {
                for r in r0..(r0 + TILE).min(self.rows) {
                    for c in c0..(c0 + TILE).min(self.cols) {
                        t.data[c * self.rows + r] = self.data[r * self.cols + c];
                    }
                }
            }
        }
        t
    }

    fn check_field(&self, other: &Matrix) -> Result<(), LinalgError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(LinalgError::FieldMismatch)
        }
    }

    pub fn try_mul(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        self.check_field(other)?;
        if self.cols != other.rows {
            return Err(LinalgError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(&self.field, self.rows, other.cols);
        if other.cols == 0 || self.rows == 0 {
            return Ok(out);
        }
        let work = self.rows * self.cols * other.cols;
        let kernel = |(i, dst): (usize, &mut [u8])| mul_row(&self.field, self.row(i), other, dst);
        if work >= PAR_THRESHOLD {
            crate::par::for_each_chunk(&mut out.data, other.cols, kernel);
        } else {
            out.data.chunks_mut(other.cols).enumerate().for_each(kernel);
        }
        Ok(out)
    }

    /// Matrix product; panics on shape mismatch.
    pub fn mul(&self, other: &Matrix) -> Matrix {
        self.try_mul(other).expect("matrix product")
    }

    pub fn mul_vec(&self, v: &[u8]) -> Vec<u8> {
        assert_eq!(v.len(), self.cols);
        let f = &self.field;
        if matches!(f.kind(), Kind::Prime) && self.cols < 1 << 16 {
            let p = f.order() as u32;
            return (0..self.rows)
                .map(|r| {
                    let dot: u32 = self.row(r).iter().zip(v).map(|(&a, &b)| a as u32 * b as u32).sum();
                    (dot % p) as u8
                })
                .collect();
        }
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(0u8, |acc, (&a, &b)| if a == 0 || b == 0 { acc } else { f.add(acc, f.mul(a, b)) })
            })
            .collect()
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.shape(), other.shape(), "matrix sum shape");
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn add_assign(&mut self, other: &Matrix) {
        assert_eq!(self.shape(), other.shape(), "matrix sum shape");
        let f = self.field.clone();
        f.axpy(&mut self.data, 1, &other.data);
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, c: u8, other: &Matrix) {
        assert_eq!(self.shape(), other.shape(), "matrix sum shape");
        let f = self.field.clone();
        f.axpy(&mut self.data, c, &other.data);
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        let mut out = self.clone();
        let f = self.field.clone();
        f.axpy(&mut out.data, f.neg(1), &other.data);
        out
    }

    pub fn scaled(&self, c: u8) -> Matrix {
        let mut out = self.clone();
        self.field.scale(&mut out.data, c);
        out
    }

    pub fn pow(&self, mut e: u64) -> Matrix {
        assert!(self.is_square());
        let mut base = self.clone();
        let mut acc = Matrix::identity(&self.field, self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for r in 0..self.rows {
            data.extend_from_slice(self.row(r));
            data.extend_from_slice(other.row(r));
        }
        Matrix::from_data(&self.field, self.rows, cols, data)
    }

    /// `[self; other]`.
    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Matrix::from_data(&self.field, self.rows + other.rows, self.cols, data)
    }

    pub fn vstack_all(field: &Field, cols: usize, parts: &[&Matrix]) -> Matrix {
        let mut data = Vec::new();
        let mut rows = 0;
        for p in parts {
            assert_eq!(p.cols, cols);
            data.extend_from_slice(&p.data);
            rows += p.rows;
        }
        Matrix::from_data(field, rows, cols, data)
    }

    pub fn block_diag(field: &Field, blocks: &[&Matrix]) -> Matrix {
        let rows: usize = blocks.iter().map(|b| b.rows).sum();
        let cols: usize = blocks.iter().map(|b| b.cols).sum();
        let mut m = Matrix::zeros(field, rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            m.set_block(r0, c0, b);
            r0 += b.rows;
            c0 += b.cols;
        }
        m
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Matrix) {
        assert!(r0 + b.rows <= self.rows && c0 + b.cols <= self.cols);
        for r in 0..b.rows {
            let dst = (r0 + r) * self.cols + c0;
            self.data[dst..dst + b.cols].copy_from_slice(b.row(r));
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Matrix {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols);
        let mut data = Vec::with_capacity(rows * cols);
        for r in r0..r0 + rows {
            data.extend_from_slice(&self.row(r)[c0..c0 + cols]);
        }
        Matrix::from_data(&self.field, rows, cols, data)
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &r in idx {
            data.extend_from_slice(self.row(r));
        }
        Matrix::from_data(&self.field, idx.len(), self.cols, data)
    }

    pub fn select_cols(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(self.rows * idx.len());
        for r in 0..self.rows {
            let row = self.row(r);
            data.extend(idx.iter().map(|&c| row[c]));
        }
        Matrix::from_data(&self.field, self.rows, idx.len(), data)
    }

    /// Row-major flattening into a single vector.
    pub fn flatten(&self) -> Vec<u8> {
        self.data.clone()
    }

    /// Gauss-Jordan elimination with first-nonzero pivoting.
    pub fn rref(&self) -> Rref {
        let mut m = self.clone();
        let pivots = m.rref_in_place(self.cols);
        Rref { reduced: m, pivots }
    }

    /// Reduce in place, choosing pivots only among the first `pivot_cols` columns.
    /// Returns the pivot columns; rows beyond the rank are left zero in those columns.
    pub(crate) fn rref_in_place(&mut self, pivot_cols: usize) -> Vec<usize> {
        let f = self.field.clone();
        let cols = self.cols;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..pivot_cols {
            if r == self.rows {
                break;
            }
            let Some(src) = (r..self.rows).find(|&i| self.data[i * cols + c] != 0) else {
                continue;
            };
            if src != r {
                for k in 0..cols {
                    self.data.swap(src * cols + k, r * cols + k);
                }
            }
            let lead = self.data[r * cols + c];
            if lead != 1 {
                let inv = f.inv(lead);
                f.scale(&mut self.data[r * cols..(r + 1) * cols], inv);
            }
            let (before, rest) = self.data.split_at_mut(r * cols);
            let (pivot_row, after) = rest.split_at_mut(cols);
            for row in before.chunks_mut(cols).chain(after.chunks_mut(cols)) {
                let v = row[c];
                if v != 0 {
                    f.axpy(&mut row[c..], f.neg(v), &pivot_row[c..]);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        if self.rows > self.cols {
            return self.transpose().rank();
        }
        self.clone().rref_in_place(self.cols).len()
    }

    /// Basis of the right kernel as columns. Each basis vector has a 1 at its own
    /// free column and 0 at the other free columns.
    pub fn nullspace(&self) -> Matrix {
        let Rref { reduced, pivots } = self.rref();
        nullspace_from_rref(&reduced, &pivots)
    }

    /// Solve `self * X = rhs` column by column; `None` marks an inconsistent column.
    pub fn solve(&self, rhs: &Matrix) -> Result<Vec<Option<Vec<u8>>>, LinalgError> {
        self.check_field(rhs)?;
        if rhs.rows != self.rows {
            return Err(LinalgError::Shape(format!(
                "right-hand side has {} rows, system has {}",
                rhs.rows, self.rows
            )));
        }
        let mut aug = self.hstack(rhs);
        let pivots = aug.rref_in_place(self.cols);
        let rank = pivots.len();
        let out = (0..rhs.cols)
            .map(|j| {
                let col = self.cols + j;
                if (rank..self.rows).any(|r| aug.get(r, col) != 0) {
                    return None;
                }
                let mut x = vec![0u8; self.cols];
                for (i, &p) in pivots.iter().enumerate() {
                    x[p] = aug.get(i, col);
                }
                Some(x)
            })
            .collect();
        Ok(out)
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut aug = self.hstack(&Matrix::identity(&self.field, n));
        let pivots = aug.rref_in_place(n);
        if pivots.len() < n {
            return None;
        }
        Some(aug.block(0, n, n, n))
    }
}

pub(crate) fn nullspace_from_rref(reduced: &Matrix, pivots: &[usize]) -> Matrix {
    let f = reduced.field();
    let cols = reduced.cols();
    let mut is_pivot = vec![false; cols];
    for &p in pivots {
        is_pivot[p] = true;
    }
    let free: Vec<usize> = (0..cols).filter(|&c| !is_pivot[c]).collect();
    let mut ns = Matrix::zeros(f, cols, free.len());
    for (j, &fc) in free.iter().enumerate() {
        ns.set(fc, j, 1);
        for (i, &p) in pivots.iter().enumerate() {
            let v = reduced.get(i, fc);
            if v != 0 {
                ns.set(p, j, f.neg(v));
            }
        }
    }
    ns
}

fn mul_row(field: &Field, a_row: &[u8], b: &Matrix, dst: &mut [u8]) {
    let n = b.cols;
    match field.kind() {
        Kind::Prime if field.order() > 2 => {
            // delayed reduction in u32
            let p = field.order() as u32;
            let limit = u32::MAX / ((p - 1) * (p - 1)).max(1) - 1;
            let mut acc = vec![0u32; n];
            let mut pending = 0u32;
            for (k, &a) in a_row.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                let a = a as u32;
                for (s, &x) in acc.iter_mut().zip(b.row(k)) {
                    *s += a * x as u32;
                }
                pending += 1;
                if pending == limit {
                    acc.iter_mut().for_each(|s| *s %= p);
                    pending = 0;
                }
            }
            for (d, s) in dst.iter_mut().zip(acc) {
                *d = (s % p) as u8;
            }
        }
        _ => {
            for (k, &a) in a_row.iter().enumerate() {
                if a != 0 {
                    field.axpy(dst, a, b.row(k));
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(q: u64) -> Field {
        Field::of_order(q).unwrap()
    }

    #[test]
    fn identity_has_full_rank() {
        let f = gf(3);
        let i = Matrix::identity(&f, 3);
        assert_eq!(i.rank(), 3);
        assert_eq!(i.nullspace().cols(), 0);
    }

    #[test]
    fn zero_matrix_nullspace() {
        let f = gf(3);
        let z = Matrix::zeros(&f, 2, 5);
        assert_eq!(z.rank(), 0);
        assert_eq!(z.nullspace().cols(), 5);
    }

    #[test]
    fn dependent_rows_gf3() {
        let f = gf(3);
        let a = Matrix::from_ints(&f, &[[1, 2], [2, 1]]);
        assert_eq!(a.rank(), 1);
    }

    #[test]
    fn empty_shapes() {
        let f = gf(2);
        let a = Matrix::zeros(&f, 0, 4);
        assert_eq!(a.rank(), 0);
        assert_eq!(a.nullspace().shape(), (4, 4));
        let b = Matrix::zeros(&f, 3, 0);
        assert_eq!(b.rank(), 0);
        assert_eq!(b.nullspace().shape(), (0, 0));
        assert_eq!(b.transpose().mul(&b).shape(), (0, 0));
        assert_eq!(b.mul(&Matrix::zeros(&f, 0, 2)), Matrix::zeros(&f, 3, 2));
    }

    #[test]
    fn solve_reports_inconsistency_per_column() {
        let f = gf(3);
        let a = Matrix::from_ints(&f, &[[1, 1], [2, 2]]);
        let b = Matrix::from_ints(&f, &[[1, 1], [2, 0]]);
        let sols = a.solve(&b).unwrap();
        let x = sols[0].as_ref().unwrap();
        assert_eq!(a.mul_vec(x), vec![1, 2]);
        assert!(sols[1].is_none());
        let bad = Matrix::zeros(&f, 3, 1);
        assert!(matches!(a.solve(&bad), Err(LinalgError::Shape(_))));
    }

    #[test]
    fn inverse_round_trip_gf4() {
        let f = gf(4);
        let a = Matrix::from_data(&f, 2, 2, vec![2, 1, 1, 2]);
        let inv = a.inverse().unwrap();
        assert!(a.mul(&inv).is_identity());
    }

    #[test]
    fn mul_prime_kernel_matches_axpy_kernel() {
        let f = gf(7);
        let a = Matrix::from_fn(&f, 5, 6, |r, c| ((r * 3 + c * 5) % 7) as u8);
        let b = Matrix::from_fn(&f, 6, 4, |r, c| ((r * r + c) % 7) as u8);
        let prod = a.mul(&b);
        for r in 0..5 {
            for c in 0..4 {
                let mut s = 0u8;
                for k in 0..6 {
                    s = f.add(s, f.mul(a.get(r, k), b.get(k, c)));
                }
                assert_eq!(prod.get(r, c), s);
            }
        }
    }
}
