//! Dense row-major matrices over a [`Scalar`].
//!
//! Representation matrices are small (tens to a few hundred rows), so plain
//! dense storage is used; every row has a single contiguous nonzero band.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let n = rows.len();
        Ok(Matrix {
            rows: n,
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Row `i` mutably together with row `i + 1`.
    pub(crate) fn row_pair_mut(&mut self, i: usize) -> (&mut [T], &[T]) {
        let c = self.cols;
        let (head, tail) = self.data[i * c..(i + 2) * c].split_at_mut(c);
        (head, tail)
    }

    pub fn remove_row(&mut self, i: usize) {
        self.data.drain(i * self.cols..(i + 1) * self.cols);
        self.rows -= 1;
    }

    pub fn row_vecs(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        self.map(|v| v.to_f64())
    }

    /// Column range `[lo, hi)` holding the nonzeros of row `i`.
    pub fn band(&self, i: usize) -> (usize, usize) {
        let row = self.row(i);
        let lo = row.iter().position(|v| !v.is_zero()).unwrap_or(0);
        let hi = row.iter().rposition(|v| !v.is_zero()).map_or(lo, |p| p + 1);
        (lo, hi)
    }

    /// Dot product of row `i` with `v`, restricted to the row band.
    pub fn row_dot(&self, i: usize, v: &[T]) -> T {
        let (lo, hi) = self.band(i);
        let row = self.row(i);
        let mut acc = T::zero();
        for j in lo..hi {
            acc = acc + row[j].clone() * v[j].clone();
        }
        acc
    }

    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "matrix has {} columns, vector has {} entries",
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows).map(|i| self.row_dot(i, v)).collect())
    }

    pub fn mul(&self, other: &Matrix<T>) -> Result<Matrix<T>> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out: Matrix<T> = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(l, j);
                    if !b.is_zero() {
                        let v = out.get(i, j).clone() + a.clone() * b.clone();
                        out.set(i, j, v);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn column_sums(&self) -> Vec<T> {
        let mut sums = vec![T::zero(); self.cols];
        for i in 0..self.rows {
            for (j, s) in sums.iter_mut().enumerate() {
                *s = s.clone() + self.get(i, j).clone();
            }
        }
        sums
    }

    /// Block layout sharing one entry: the last row/column of `self` overlaps
    /// the first row/column of `right`.
    pub fn c0_join(&self, right: &Matrix<T>, tol: f64) -> Result<Matrix<T>> {
        if self.rows == 0 || right.rows == 0 {
            return Err(Error::Dimension("cannot join an empty matrix".into()));
        }
        let l = self.get(self.rows - 1, self.cols - 1).to_f64();
        let r = right.get(0, 0).to_f64();
        if (l - 1.0).abs() > tol || (r - 1.0).abs() > tol {
            return Err(Error::Overlap { left: l, right: r });
        }
        let rows = self.rows + right.rows - 1;
        let cols = self.cols + right.cols - 1;
        let mut out = Matrix::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
        }
        let (ro, co) = (self.rows - 1, self.cols - 1);
        for i in 0..right.rows {
            for j in 0..right.cols {
                if i == 0 && j == 0 {
                    continue;
                }
                out.set(ro + i, co + j, right.get(i, j).clone());
            }
        }
        Ok(out)
    }

    /// Block diagonal concatenation (no shared entry).
    pub fn concat(&self, right: &Matrix<T>) -> Matrix<T> {
        let mut out = Matrix::zeros(self.rows + right.rows, self.cols + right.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..right.rows {
            for j in 0..right.cols {
                out.set(self.rows + i, self.cols + j, right.get(i, j).clone());
            }
        }
        out
    }

    /// Row-reduced copy: row `keep` receives the sum of rows `keep` and `keep+1`.
    pub fn merge_rows(&self, keep: usize) -> Matrix<T> {
        let mut out = Matrix::zeros(self.rows - 1, self.cols);
        for i in 0..out.rows {
            for j in 0..self.cols {
                let v = if i < keep {
                    self.get(i, j).clone()
                } else if i == keep {
                    self.get(i, j).clone() + self.get(i + 1, j).clone()
                } else {
                    self.get(i + 1, j).clone()
                };
                out.set(i, j, v);
            }
        }
        out
    }

    /// Copy with row `drop` removed.
    pub fn drop_row(&self, drop: usize) -> Matrix<T> {
        let mut out = Matrix::zeros(self.rows - 1, self.cols);
        for i in 0..out.rows {
            let src = if i < drop { i } else { i + 1 };
            for j in 0..self.cols {
                out.set(i, j, self.get(src, j).clone());
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Matrix<T>) -> Option<f64> {
        if self.rows != other.rows || self.cols != other.cols {
            return None;
        }
        Some(
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| (a.clone() - b.clone()).abs().to_f64())
                .fold(0.0, f64::max),
        )
    }

    /// Maximum column sum of absolute differences, accumulated in `T`.
    pub fn norm1_diff(&self, other: &Matrix<T>) -> Result<T> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut best = T::zero();
        for j in 0..self.cols {
            let mut s = T::zero();
            for i in 0..self.rows {
                s = s + (self.get(i, j).clone() - other.get(i, j).clone()).abs();
            }
            if s > best {
                best = s;
            }
        }
        Ok(best)
    }
}
