//! Dense matrices over a [`Field`] with exact elimination.
//!
//! Entries are raw packed field values. Pivoting is deterministic (leftmost
//! column, lowest row), so `rref`, `null_space` and `solve` return the same
//! output on every run.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::Field;

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

/// Wire form of a matrix: `{"rows":r,"cols":c,"data":[...]}` in row-major order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u32>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "Matrix {}x{} over GF({})",
            self.rows,
            self.cols,
            self.field.q()
        )?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn new(field: &Field, rows: usize, cols: usize, data: Vec<u32>) -> Result<Matrix> {
        if rows * cols != data.len() {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        for &v in &data {
            field.check(v)?;
        }
        Ok(Matrix {
            field: field.clone(),
            rows,
            cols,
            data,
        })
    }

    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Matrix {
        Matrix {
            field: field.clone(),
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: &Field, n: usize) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from equal-length rows; `cols` fixes the width when
    /// `rows` is empty.
    pub fn from_rows(field: &Field, cols: usize, rows: &[Vec<u32>]) -> Result<Matrix> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch(format!(
                "row of length {} in a matrix with {cols} columns",
                bad.len()
            )));
        }
        Matrix::new(field, rows.len(), cols, rows.concat())
    }

    pub fn from_json(field: &Field, json: &MatrixJson) -> Result<Matrix> {
        Matrix::new(field, json.rows, json.cols, json.data.clone())
    }

    pub fn to_json(&self) -> MatrixJson {
        MatrixJson {
            rows: self.rows,
            cols: self.cols,
            data: self.data.clone(),
        }
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

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Copy with entry `(i, j)` replaced.
    pub fn with_entry(&self, i: usize, j: usize, v: u32) -> Result<Matrix> {
        self.field.check(v)?;
        if i >= self.rows || j >= self.cols {
            return Err(Error::DimensionMismatch(format!(
                "entry ({i},{j}) outside {}x{}",
                self.rows, self.cols
            )));
        }
        let mut m = self.clone();
        m.data[i * self.cols + j] = v;
        Ok(m)
    }

    pub fn transpose(&self) -> Matrix {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j));
            }
        }
        Matrix {
            field: self.field.clone(),
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// Columns `cols` in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Result<Matrix> {
        if let Some(&j) = cols.iter().find(|&&j| j >= self.cols) {
            return Err(Error::CoordinateOutOfRange {
                index: j,
                n: self.cols,
            });
        }
        let mut data = Vec::with_capacity(self.rows * cols.len());
        for i in 0..self.rows {
            let row = self.row(i);
            data.extend(cols.iter().map(|&j| row[j]));
        }
        Ok(Matrix {
            field: self.field.clone(),
            rows: self.rows,
            cols: cols.len(),
            data,
        })
    }

    /// `self` on top of `other`.
    pub fn stack(&self, other: &Matrix) -> Result<Matrix> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "cannot stack {} columns on {}",
                self.cols, other.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Matrix {
            field: self.field.clone(),
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = Matrix::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] = f.add(out.data[idx], f.mul(a, other.get(l, j)));
                }
            }
        }
        Ok(out)
    }

    /// `self · v`.
    pub fn mul_vec(&self, v: &[u32]) -> Result<Vec<u32>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        let f = &self.field;
        Ok((0..self.rows).map(|i| dot(f, self.row(i), v)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn rank(&self) -> usize {
        let mut work = self.data.clone();
        eliminate(&self.field, &mut work, self.rows, self.cols, false).len()
    }

    /// Rank of the submatrix on `cols`, without materialising a new `Matrix`.
    pub fn rank_of_columns(&self, cols: &[usize]) -> usize {
        let mut work = Vec::with_capacity(self.rows * cols.len());
        for i in 0..self.rows {
            let row = self.row(i);
            work.extend(cols.iter().map(|&j| row[j]));
        }
        eliminate(&self.field, &mut work, self.rows, cols.len(), false).len()
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut work = self.data.clone();
        let pivots = eliminate(&self.field, &mut work, self.rows, self.cols, true);
        let m = Matrix {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data: work,
        };
        (m, pivots)
    }

    /// Basis of the right kernel, one vector per row.
    ///
    /// The basis vector for free column `f` has a 1 at `f`, zeros at the
    /// other free columns, and whatever the pivot columns require.
    pub fn null_space(&self) -> Matrix {
        let (r, pivots) = self.rref();
        let f = &self.field;
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let free: Vec<usize> = (0..self.cols).filter(|&j| !is_pivot[j]).collect();
        let mut out = Matrix::zeros(f, free.len(), self.cols);
        for (b, &fc) in free.iter().enumerate() {
            out.data[b * self.cols + fc] = 1;
            for (i, &p) in pivots.iter().enumerate() {
                out.data[b * self.cols + p] = f.neg(r.get(i, fc));
            }
        }
        out
    }

    /// Some `x` with `self · x = b`; free variables are set to zero.
    pub fn solve(&self, b: &[u32]) -> Result<Vec<u32>> {
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side of length {} for {} rows",
                b.len(),
                self.rows
            )));
        }
        let w = self.cols + 1;
        let mut work = Vec::with_capacity(self.rows * w);
        for i in 0..self.rows {
            work.extend_from_slice(self.row(i));
            work.push(self.field.check(b[i])?);
        }
        let pivots = eliminate(&self.field, &mut work, self.rows, w, true);
        if pivots.last() == Some(&self.cols) {
            return Err(Error::NoSolution);
        }
        let mut x = vec![0u32; self.cols];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = work[i * w + self.cols];
        }
        Ok(x)
    }

    /// Nonzero rows of the reduced echelon form: a canonical row-space basis.
    pub fn row_basis(&self) -> Matrix {
        let (r, pivots) = self.rref();
        Matrix {
            field: self.field.clone(),
            rows: pivots.len(),
            cols: self.cols,
            data: r.data[..pivots.len() * self.cols].to_vec(),
        }
    }
}

/// True iff `a` and `b` span the same row space.
pub fn row_space_equal(a: &Matrix, b: &Matrix) -> Result<bool> {
    let stacked = a.stack(b)?;
    let ra = a.rank();
    Ok(ra == b.rank() && ra == stacked.rank())
}

/// Generalised Vandermonde matrix: entry `(i, j)` is `points[j]^(start_power + i)`.
pub fn vandermonde(
    field: &Field,
    points: &[u32],
    height: usize,
    start_power: i64,
) -> Result<Matrix> {
    for (j, &x) in points.iter().enumerate() {
        field.check(x)?;
        if let Some(i) = points[..j].iter().position(|&y| y == x) {
            return Err(Error::DuplicatePoint(i, j));
        }
    }
    let mut data = Vec::with_capacity(height * points.len());
    for i in 0..height {
        for &x in points {
            data.push(field.pow(x, start_power + i as i64)?);
        }
    }
    Matrix::new(field, height, points.len(), data)
}

pub(crate) fn dot(f: &Field, a: &[u32], b: &[u32]) -> u32 {
    a.iter()
        .zip(b)
        .fold(0, |acc, (&x, &y)| f.add(acc, f.mul(x, y)))
}

/// In-place Gaussian elimination on a row-major buffer; returns pivot columns.
///
/// With `reduce` the result is in reduced row echelon form; otherwise only
/// rows below each pivot are cleared, which is enough for rank.
fn eliminate(f: &Field, m: &mut [u32], rows: usize, cols: usize, reduce: bool) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| m[i * cols + c] != 0) else {
            continue;
        };
        if pr != r {
            for j in 0..cols {
                m.swap(pr * cols + j, r * cols + j);
            }
        }
        let inv = f.inv(m[r * cols + c]).expect("pivot is nonzero");
        if reduce {
            for j in c..cols {
                m[r * cols + j] = f.mul(m[r * cols + j], inv);
            }
        }
        let start = if reduce { 0 } else { r + 1 };
        for i in start..rows {
            if i == r {
                continue;
            }
            let lead = m[i * cols + c];
            if lead == 0 {
                continue;
            }
            let factor = if reduce { lead } else { f.mul(lead, inv) };
            let factor = f.neg(factor);
            for j in c..cols {
                let v = m[r * cols + j];
                if v != 0 {
                    m[i * cols + j] = f.add(m[i * cols + j], f.mul(factor, v));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gf(q: u64) -> Field {
        Field::of_order(q).unwrap()
    }

    #[test]
    fn basic_ranks() {
        let f = gf(16);
        assert_eq!(Matrix::zeros(&f, 3, 4).rank(), 0);
        assert_eq!(Matrix::identity(&f, 5).rank(), 5);
        let pts: Vec<u32> = (0..5).map(|i| f.alpha_pow(i)).collect();
        let v = vandermonde(&f, &pts, 3, 0).unwrap();
        assert_eq!(v.rank(), 3);
        let v = vandermonde(&f, &pts[..3], 4, 0).unwrap();
        assert_eq!(v.rank(), 3);
        assert_eq!(vandermonde(&f, &pts, 1, 0).unwrap().row(0), &[1; 5]);
        assert_eq!(
            vandermonde(&f, &[1, 2, 1], 2, 0).unwrap_err(),
            Error::DuplicatePoint(0, 2)
        );
    }

    #[test]
    fn rref_outer_product_has_one_pivot() {
        let f = gf(13);
        let a = [3u32, 0, 7];
        let b = [1u32, 5, 12, 0];
        let data: Vec<u32> = a
            .iter()
            .flat_map(|&x| b.iter().map(move |&y| (x * y) % 13))
            .collect();
        let m = Matrix::new(&f, 3, 4, data).unwrap();
        let (r, pivots) = m.rref();
        assert_eq!(pivots, vec![0]);
        assert_eq!(r.row(0), &[1, 5, 12, 0]);
        assert!(r.row(1).iter().chain(r.row(2)).all(|&v| v == 0));
        let (i, p) = Matrix::identity(&f, 3).rref();
        assert_eq!(i, Matrix::identity(&f, 3));
        assert_eq!(p, vec![0, 1, 2]);
    }

    #[test]
    fn even_weight_null_space() {
        let f = gf(2);
        for n in 1..=6usize {
            let ones = Matrix::new(&f, 1, n, vec![1; n]).unwrap();
            let ns = ones.null_space();
            assert_eq!(ns.rows(), n - 1);
            // every even-weight word is in the span: count span size
            let mut span = std::collections::HashSet::new();
            for mask in 0u32..(1 << ns.rows()) {
                let mut w = vec![0u32; n];
                for b in 0..ns.rows() {
                    if mask >> b & 1 == 1 {
                        for j in 0..n {
                            w[j] ^= ns.get(b, j);
                        }
                    }
                }
                assert_eq!(w.iter().sum::<u32>() % 2, 0);
                span.insert(w);
            }
            assert_eq!(span.len(), 1 << (n - 1));
        }
        assert_eq!(Matrix::identity(&f, 4).null_space().rows(), 0);
    }

    #[test]
    fn solving() {
        let f = gf(7);
        let i = Matrix::identity(&f, 3);
        assert_eq!(i.solve(&[1, 2, 3]).unwrap(), vec![1, 2, 3]);
        let a = Matrix::new(&f, 2, 3, vec![1, 2, 3, 4, 5, 6]).unwrap();
        assert_eq!(a.solve(&[0, 0]).unwrap(), vec![0, 0, 0]);
        let x = a.solve(&[1, 6]).unwrap();
        assert_eq!(a.mul_vec(&x).unwrap(), vec![1, 6]);
        let inconsistent = a
            .stack(&Matrix::new(&f, 1, 3, vec![0, 0, 0]).unwrap())
            .unwrap();
        assert_eq!(inconsistent.solve(&[0, 0, 1]), Err(Error::NoSolution));
    }

    #[test]
    fn row_space_comparisons() {
        let f = gf(5);
        let a = Matrix::new(&f, 2, 3, vec![1, 2, 3, 0, 1, 4]).unwrap();
        let swapped = Matrix::new(&f, 2, 3, vec![0, 1, 4, 1, 2, 3]).unwrap();
        let scaled = Matrix::new(&f, 2, 3, vec![2, 4, 1, 0, 1, 4]).unwrap();
        assert!(row_space_equal(&a, &swapped).unwrap());
        assert!(row_space_equal(&a, &scaled).unwrap());
        let e1 = Matrix::new(&f, 1, 2, vec![1, 0]).unwrap();
        let e2 = Matrix::new(&f, 1, 2, vec![0, 1]).unwrap();
        assert!(!row_space_equal(&e1, &e2).unwrap());
        let other = Matrix::new(&gf(7), 1, 2, vec![1, 0]).unwrap();
        assert_eq!(row_space_equal(&e1, &other), Err(Error::FieldMismatch));
    }

    fn arb_matrix() -> impl Strategy<Value = (u64, usize, usize, Vec<u32>)> {
        (
            prop::sample::select(vec![2u64, 3, 4, 9, 16]),
            1usize..6,
            1usize..7,
        )
            .prop_flat_map(|(q, r, c)| {
                (
                    Just(q),
                    Just(r),
                    Just(c),
                    prop::collection::vec(0..q as u32, r * c),
                )
            })
    }

    proptest! {
        #[test]
        fn rank_invariants((q, r, c, data) in arb_matrix(), perm_seed in any::<u64>(), scale in 1u32..100) {
            let f = gf(q);
            let m = Matrix::new(&f, r, c, data).unwrap();
            let rank = m.rank();
            prop_assert!(rank <= r.min(c));
            prop_assert_eq!(rank, m.transpose().rank());
            prop_assert_eq!(rank, m.rref().1.len());
            let ns = m.null_space();
            prop_assert_eq!(ns.rows() + rank, c);
            prop_assert!(m.mul(&ns.transpose()).unwrap().is_zero());

            // permute columns, scale a row by a nonzero constant
            let mut cols: Vec<usize> = (0..c).collect();
            cols.rotate_left((perm_seed % c as u64) as usize);
            let permuted = m.select_columns(&cols).unwrap();
            prop_assert_eq!(permuted.rank(), rank);
            let lambda = 1 + scale % (f.q() - 1);
            let mut data = m.data().to_vec();
            for v in data.iter_mut().take(c) {
                *v = f.mul(*v, lambda);
            }
            prop_assert_eq!(Matrix::new(&f, r, c, data).unwrap().rank(), rank);
        }
    }
}
