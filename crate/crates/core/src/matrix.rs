//! Row-major dense matrices sized for regression problems (n in the tens
//! to thousands, k small). No BLAS; the straightforward triple loop is
//! plenty at these sizes and keeps results bit-reproducible.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense row-major matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    /// Builds a matrix from row slices. Errors on ragged rows, empty
    /// dimensions, or non-finite entries.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::DimensionMismatch("matrix must be non-empty".into()));
        }
        let cols = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "ragged rows: expected {} columns, found {}",
                    cols,
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        let m = Self { rows: rows.len(), cols, data };
        m.ensure_finite()?;
        Ok(m)
    }

    /// Builds a matrix column by column.
    pub fn from_columns(columns: &[Vec<T>]) -> Result<Self> {
        if columns.is_empty() || columns[0].is_empty() {
            return Err(Error::DimensionMismatch("matrix must be non-empty".into()));
        }
        let rows = columns[0].len();
        for c in columns {
            if c.len() != rows {
                return Err(Error::DimensionMismatch("columns differ in length".into()));
            }
        }
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m.ensure_finite()?;
        Ok(m)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }

    /// Single column of ones, the design of a direct-measurement problem.
    pub fn column_of_ones(n: usize) -> Self {
        Self { rows: n, cols: 1, data: vec![T::one(); n] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> T {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<T> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(r, j);
                if a == T::zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let v = out.get(r, c) + a * other.get(j, c);
                    out.set(r, c, v);
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "matrix has {} columns, vector has {} entries",
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|r| {
                let mut acc = T::zero();
                for c in 0..self.cols {
                    acc += self.get(r, c) * v[c];
                }
                acc
            })
            .collect())
    }

    /// `XᵀX`, symmetrized exactly by computing only one triangle.
    pub fn gram(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.cols);
        for a in 0..self.cols {
            for b in a..self.cols {
                let mut acc = T::zero();
                for r in 0..self.rows {
                    acc += self.get(r, a) * self.get(r, b);
                }
                out.set(a, b, acc);
                out.set(b, a, acc);
            }
        }
        out
    }

    /// `Xᵀv` without materializing the transpose.
    pub fn transpose_matvec(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "matrix has {} rows, vector has {} entries",
                self.rows,
                v.len()
            )));
        }
        Ok((0..self.cols)
            .map(|c| {
                let mut acc = T::zero();
                for r in 0..self.rows {
                    acc += self.get(r, c) * v[r];
                }
                acc
            })
            .collect())
    }

    pub fn scale(&self, factor: T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| v * factor).collect(),
        }
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_symmetric(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        let tol = T::consistency_tol() * self.max_abs().max(T::one());
        for r in 0..self.rows {
            for c in (r + 1)..self.cols {
                if (self.get(r, c) - self.get(c, r)).abs() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// Averages the off-diagonal pairs; used after an inverse computed by
    /// triangular solves, where rounding breaks symmetry at machine level.
    pub fn symmetrized(&self) -> Self {
        debug_assert!(self.is_square());
        let mut out = self.clone();
        let half = T::from_f64_c(0.5);
        for r in 0..self.rows {
            for c in (r + 1)..self.cols {
                let v = (self.get(r, c) + self.get(c, r)) * half;
                out.set(r, c, v);
                out.set(c, r, v);
            }
        }
        out
    }

    pub fn ensure_finite(&self) -> Result<()> {
        if self.data.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite("matrix entries"))
        }
    }

    /// Nested-row copy, the shape used by configuration files and reports.
    pub fn to_nested_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }
}

/// Dot product of two equal-length slices.
pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

/// Euclidean norm.
pub fn norm2<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gram_matches_explicit_product() {
        let x = DenseMatrix::from_rows(&[
            vec![1.0, 2.0],
            vec![3.0, 4.0],
            vec![5.0, 6.0],
        ])
        .unwrap();
        let g = x.gram();
        let explicit = x.transpose().matmul(&x).unwrap();
        assert_eq!(g, explicit);
        assert!(g.is_symmetric());
    }

    #[test]
    fn matvec_and_transpose_matvec_agree_with_loops() {
        let x = DenseMatrix::from_rows(&[vec![1.0, -1.0], vec![2.0, 0.5]]).unwrap();
        assert_eq!(x.matvec(&[1.0, 2.0]).unwrap(), vec![-1.0, 3.0]);
        assert_eq!(x.transpose_matvec(&[1.0, 2.0]).unwrap(), vec![5.0, 0.0]);
    }

    #[test]
    fn ragged_and_nonfinite_inputs_are_rejected() {
        assert!(DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0]]).is_err());
        assert!(DenseMatrix::from_rows(&[vec![f64::NAN]]).is_err());
        assert!(DenseMatrix::<f64>::from_rows(&[]).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let x = DenseMatrix::<f32>::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        assert!(x.is_symmetric());
        assert_eq!(x.matvec(&[1.0, 1.0]).unwrap(), vec![3.0f32, 3.0]);
    }
}
