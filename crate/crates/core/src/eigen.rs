//! Symmetric eigendecomposition by cyclic Jacobi rotations.
//!
//! The matrices this crate decomposes are tiny (the k×k inverse Gram
//! matrix, occasionally an n×n error covariance), so the quadratically
//! convergent Jacobi sweep is both simple and accurate: every rotation is
//! orthogonal to machine precision, which keeps eigenvectors orthonormal
//! without re-orthogonalization.
//!
//! Conventions, relied on throughout the crate:
//!
//! - eigenvalues are sorted in descending order;
//! - each eigenvector is normalized so its largest-magnitude entry is
//!   positive, ties broken by the lowest index. This pins the sign of the
//!   correction direction, making alternative estimates reproducible.

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::scalar::Scalar;

/// Eigenvalues (descending) paired with eigenvector columns.
#[derive(Debug, Clone)]
pub struct SymEigResult<T> {
    pub eigenvalues: Vec<T>,
    /// Column `i` is the unit eigenvector for `eigenvalues[i]`.
    pub eigenvectors: DenseMatrix<T>,
}

impl<T: Scalar> SymEigResult<T> {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Eigenvector for the largest eigenvalue.
    pub fn top_vector(&self) -> Vec<T> {
        self.eigenvectors.column(0)
    }

    pub fn top_value(&self) -> T {
        self.eigenvalues[0]
    }

    pub fn sum(&self) -> T {
        self.eigenvalues.iter().copied().fold(T::zero(), |a, b| a + b)
    }
}

// Off-diagonal Frobenius norm.
fn off_diagonal_norm<T: Scalar>(a: &DenseMatrix<T>) -> T {
    let n = a.rows();
    let mut acc = T::zero();
    for r in 0..n {
        for c in 0..n {
            if r != c {
                let v = a.get(r, c);
                acc += v * v;
            }
        }
    }
    acc.sqrt()
}

/// Decomposes a symmetric matrix. Errors on non-square, non-symmetric, or
/// non-finite input.
///
/// Sweeps run until the off-diagonal norm drops below `1e-13` relative to
/// the Frobenius norm of the input (or the scalar type's epsilon if that
/// is coarser), which leaves reconstruction residuals near 1e-15 relative
/// in double precision.
pub fn sym_eig<T: Scalar>(a: &DenseMatrix<T>) -> Result<SymEigResult<T>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("eigendecomposition requires a square matrix".into()));
    }
    a.ensure_finite()?;
    if !a.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let n = a.rows();
    if n == 1 {
        return Ok(SymEigResult {
            eigenvalues: vec![a.get(0, 0)],
            eigenvectors: DenseMatrix::identity(1),
        });
    }

    let mut m = a.clone();
    let mut v = DenseMatrix::identity(n);
    let scale = {
        let mut acc = T::zero();
        for r in 0..n {
            for c in 0..n {
                let x = m.get(r, c);
                acc += x * x;
            }
        }
        acc.sqrt()
    };
    if scale == T::zero() {
        // Zero matrix: identity eigenvectors already satisfy conventions.
        return Ok(SymEigResult { eigenvalues: vec![T::zero(); n], eigenvectors: v });
    }
    let tol = scale * T::from_f64_c(1e-13).max(T::epsilon() * T::from_f64_c(4.0));

    let max_sweeps = 60;
    let mut converged = false;
    for _ in 0..max_sweeps {
        if off_diagonal_norm(&m) <= tol {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                if apq == T::zero() {
                    continue;
                }
                // Symmetric Schur rotation annihilating (p, q).
                let theta = (m.get(q, q) - m.get(p, p)) / (T::from_f64_c(2.0) * apq);
                let t = {
                    let sign = if theta >= T::zero() { T::one() } else { -T::one() };
                    sign / (theta.abs() + (theta * theta + T::one()).sqrt())
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;

                for i in 0..n {
                    let mip = m.get(i, p);
                    let miq = m.get(i, q);
                    m.set(i, p, c * mip - s * miq);
                    m.set(i, q, s * mip + c * miq);
                }
                for i in 0..n {
                    let mpi = m.get(p, i);
                    let mqi = m.get(q, i);
                    m.set(p, i, c * mpi - s * mqi);
                    m.set(q, i, s * mpi + c * mqi);
                }
                for i in 0..n {
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, c * vip - s * viq);
                    v.set(i, q, s * vip + c * viq);
                }
            }
        }
    }
    if !converged && off_diagonal_norm(&m) > tol {
        return Err(Error::NoConvergence);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        m.get(j, j).partial_cmp(&m.get(i, i)).expect("finite eigenvalues")
    });

    let eigenvalues: Vec<T> = order.iter().map(|&i| m.get(i, i)).collect();
    let mut eigenvectors = DenseMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = v.column(src);
        // Largest-magnitude entry positive; strict comparison keeps the
        // lowest index on ties.
        let mut lead = 0;
        for (i, x) in col.iter().enumerate() {
            if x.abs() > col[lead].abs() {
                lead = i;
            }
        }
        if col[lead] < T::zero() {
            for x in col.iter_mut() {
                *x = -*x;
            }
        }
        for (r, x) in col.into_iter().enumerate() {
            eigenvectors.set(r, dst, x);
        }
    }

    Ok(SymEigResult { eigenvalues, eigenvectors })
}
