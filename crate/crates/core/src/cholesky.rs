//! Cholesky factorization for symmetric positive-definite systems.
//!
//! Factorization failure (a non-positive pivot) doubles as the primary
//! rank-deficiency signal for normal-equation matrices.

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::scalar::Scalar;

/// Lower-triangular factor `L` with `A = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct CholeskyFactor<T> {
    l: DenseMatrix<T>,
}

/// Factors a symmetric positive-definite matrix.
pub fn cholesky<T: Scalar>(a: &DenseMatrix<T>) -> Result<CholeskyFactor<T>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("cholesky requires a square matrix".into()));
    }
    if !a.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let n = a.rows();
    let mut l = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut diag = a.get(j, j);
        for p in 0..j {
            diag -= l.get(j, p) * l.get(j, p);
        }
        if !(diag > T::zero()) || !diag.is_finite() {
            return Err(Error::RankDeficient(format!(
                "non-positive pivot at column {j} during factorization"
            )));
        }
        let root = diag.sqrt();
        l.set(j, j, root);
        for i in (j + 1)..n {
            let mut v = a.get(i, j);
            for p in 0..j {
                v -= l.get(i, p) * l.get(j, p);
            }
            l.set(i, j, v / root);
        }
    }
    Ok(CholeskyFactor { l })
}

impl<T: Scalar> CholeskyFactor<T> {
    pub fn dim(&self) -> usize {
        self.l.rows()
    }

    /// Solves `A x = b` by forward then backward substitution.
    pub fn solve_vec(&self, b: &[T]) -> Result<Vec<T>> {
        let n = self.dim();
        if b.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "system is {}x{}, right-hand side has {} entries",
                n,
                n,
                b.len()
            )));
        }
        let mut y = b.to_vec();
        for i in 0..n {
            for p in 0..i {
                let v = y[p];
                y[i] = y[i] - self.l.get(i, p) * v;
            }
            y[i] = y[i] / self.l.get(i, i);
        }
        for i in (0..n).rev() {
            for p in (i + 1)..n {
                let v = y[p];
                y[i] = y[i] - self.l.get(p, i) * v;
            }
            y[i] = y[i] / self.l.get(i, i);
        }
        Ok(y)
    }

    /// Solves `A X = B` column by column.
    pub fn solve_mat(&self, b: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
        if b.rows() != self.dim() {
            return Err(Error::DimensionMismatch(
                "right-hand side row count does not match system".into(),
            ));
        }
        let mut out = DenseMatrix::zeros(b.rows(), b.cols());
        for c in 0..b.cols() {
            let col = self.solve_vec(&b.column(c))?;
            for (r, v) in col.into_iter().enumerate() {
                out.set(r, c, v);
            }
        }
        Ok(out)
    }

    /// `A⁻¹`, symmetrized to absorb triangular-solve rounding.
    pub fn inverse(&self) -> Result<DenseMatrix<T>> {
        let inv = self.solve_mat(&DenseMatrix::identity(self.dim()))?;
        Ok(inv.symmetrized())
    }
}

/// One-shot solve of `A x = B` for SPD `A`.
pub fn spd_solve<T: Scalar>(a: &DenseMatrix<T>, b: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    cholesky(a)?.solve_mat(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Explicit inverse of a 3x3 matrix via cofactor expansion; independent
    // oracle for the triangular solves.
    fn inverse3(a: &DenseMatrix<f64>) -> DenseMatrix<f64> {
        let m = |r: usize, c: usize| a.get(r, c);
        let det = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
            - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
            + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
        let cof = [
            [
                m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1),
                m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2),
                m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1),
            ],
            [
                m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2),
                m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0),
                m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2),
            ],
            [
                m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0),
                m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1),
                m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0),
            ],
        ];
        let rows: Vec<Vec<f64>> = cof
            .iter()
            .map(|row| row.iter().map(|v| v / det).collect())
            .collect();
        DenseMatrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn diagonal_system() {
        let a = DenseMatrix::from_rows(&[vec![2.0f64, 0.0], vec![0.0, 5.0]]).unwrap();
        let x = cholesky(&a).unwrap().solve_vec(&[2.0, 10.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14);
        assert!((x[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn inverse_matches_cofactor_oracle() {
        let a = DenseMatrix::from_rows(&[
            vec![4.0, 1.0, 0.5],
            vec![1.0, 3.0, -0.25],
            vec![0.5, -0.25, 2.0],
        ])
        .unwrap();
        let inv = cholesky(&a).unwrap().inverse().unwrap();
        let oracle = inverse3(&a);
        for r in 0..3 {
            for c in 0..3 {
                assert!(
                    (inv.get(r, c) - oracle.get(r, c)).abs() < 1e-13,
                    "entry ({r},{c}): {} vs {}",
                    inv.get(r, c),
                    oracle.get(r, c)
                );
            }
        }
    }

    #[test]
    fn indefinite_matrix_is_rejected() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(matches!(cholesky(&a), Err(Error::RankDeficient(_))));
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert!(cholesky(&a).is_err());
    }
}
