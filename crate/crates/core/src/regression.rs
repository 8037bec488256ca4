//! Regression problems: construction, preprocessing, and the ordinary
//! least-squares stage.

use crate::cholesky::cholesky;
use crate::eigen::{sym_eig, SymEigResult};
use crate::error::{Error, Result};
use crate::matrix::{dot, DenseMatrix};
use crate::scalar::Scalar;

/// Ratio of the probable error to the standard deviation of a normal
/// distribution (the 0.75 quantile of |N(0,1)|).
const PROBABLE_ERROR_RATIO: f64 = 0.6745;

/// Relative eigenvalue floor below which a design counts as rank
/// deficient even when the factorization squeaks through.
const RANK_RATIO_FLOOR: f64 = 1e-10;

/// How a problem's data relates to what was originally ingested.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance<T> {
    Raw,
    /// Column means removed from the design and the response.
    Centered { x_means: Vec<T>, y_mean: T },
    /// Rows rescaled to homogenize the error covariance. The diagonal
    /// variant keeps the row scale factors for reporting.
    Whitened { row_scales: Option<Vec<T>> },
}

/// A validated design/response pair.
///
/// Invariants: dimensions agree, all entries finite, `n > k >= 1`, and at
/// construction time the design had full column rank.
#[derive(Debug, Clone)]
pub struct RegressionProblem<T> {
    x: DenseMatrix<T>,
    y: Vec<T>,
    provenance: Provenance<T>,
}

/// Builds a problem from a design matrix and response vector, validating
/// dimensions, finiteness, degrees of freedom, and column rank.
pub fn build_problem<T: Scalar>(x: DenseMatrix<T>, y: Vec<T>) -> Result<RegressionProblem<T>> {
    if y.len() != x.rows() {
        return Err(Error::DimensionMismatch(format!(
            "design has {} rows but response has {} entries",
            x.rows(),
            y.len()
        )));
    }
    x.ensure_finite()?;
    if !y.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("response vector"));
    }
    if x.rows() <= x.cols() {
        return Err(Error::InsufficientDof { n: x.rows(), k: x.cols() });
    }
    gram_inverse_eig(&x)?; // rank check
    Ok(RegressionProblem { x, y, provenance: Provenance::Raw })
}

// Inverse Gram matrix with its eigendecomposition, which doubles as the
// rank check: the SPD factorization must succeed and the eigenvalue
// spread of (XᵀX)⁻¹ must stay within the rank floor.
fn gram_inverse_eig<T: Scalar>(
    x: &DenseMatrix<T>,
) -> Result<(DenseMatrix<T>, SymEigResult<T>)> {
    let gram = x.gram();
    let factor = cholesky(&gram).map_err(|e| match e {
        Error::RankDeficient(_) => {
            Error::RankDeficient("normal-equation matrix is not positive definite".into())
        }
        other => other,
    })?;
    let inverse = factor.inverse()?;
    let eig = sym_eig(&inverse)?;
    let top = eig.eigenvalues[0];
    let bottom = *eig.eigenvalues.last().expect("non-empty");
    if !(bottom > T::zero()) || bottom < T::from_f64_c(RANK_RATIO_FLOOR) * top {
        return Err(Error::RankDeficient(format!(
            "eigenvalue spread of the inverse normal-equation matrix exceeds 1e10 \
             (top {top:e}, bottom {bottom:e})"
        )));
    }
    Ok((inverse, eig))
}

impl<T: Scalar> RegressionProblem<T> {
    pub fn n(&self) -> usize {
        self.x.rows()
    }

    pub fn k(&self) -> usize {
        self.x.cols()
    }

    pub fn design(&self) -> &DenseMatrix<T> {
        &self.x
    }

    pub fn response(&self) -> &[T] {
        &self.y
    }

    pub fn provenance(&self) -> &Provenance<T> {
        &self.provenance
    }

    /// Removes column means from the design and the mean from the
    /// response. Errors if the problem is not raw. A constant column
    /// becomes a zero column here; the rank error surfaces at fit time.
    pub fn center(&self) -> Result<Self> {
        if self.provenance != Provenance::Raw {
            return Err(Error::InvalidParameter(
                "problem is already centered or whitened".into(),
            ));
        }
        let n = self.n();
        let nt = T::from_count(n);
        let x_means: Vec<T> = (0..self.k())
            .map(|c| self.x.column(c).into_iter().sum::<T>() / nt)
            .collect();
        let y_mean = self.y.iter().copied().sum::<T>() / nt;
        let mut x = self.x.clone();
        for r in 0..n {
            for c in 0..self.k() {
                x.set(r, c, x.get(r, c) - x_means[c]);
            }
        }
        let y = self.y.iter().map(|&v| v - y_mean).collect();
        Ok(Self { x, y, provenance: Provenance::Centered { x_means, y_mean } })
    }

    /// Recovers the intercept of the uncentered model from coefficients
    /// estimated on the centered problem. Returns `None` unless the
    /// problem is centered.
    pub fn recover_intercept(&self, coefficients: &[T]) -> Option<T> {
        match &self.provenance {
            Provenance::Centered { x_means, y_mean } => {
                Some(*y_mean - dot(x_means, coefficients))
            }
            _ => None,
        }
    }

    /// Whitens against a diagonal error covariance `diag(g)`: row `i` is
    /// scaled by `1/sqrt(g_i)`. This turns weighted least squares into an
    /// ordinary fit on the transformed data.
    pub fn whiten_diagonal(&self, g_diag: &[T]) -> Result<Self> {
        if g_diag.len() != self.n() {
            return Err(Error::DimensionMismatch(format!(
                "covariance diagonal has {} entries for {} observations",
                g_diag.len(),
                self.n()
            )));
        }
        if !g_diag.iter().all(|v| v.is_finite() && *v > T::zero()) {
            return Err(Error::RankDeficient(
                "error covariance diagonal must be strictly positive".into(),
            ));
        }
        let scales: Vec<T> = g_diag.iter().map(|&g| g.sqrt().recip()).collect();
        let mut x = self.x.clone();
        let mut y = self.y.clone();
        for r in 0..self.n() {
            for c in 0..self.k() {
                x.set(r, c, x.get(r, c) * scales[r]);
            }
            y[r] = y[r] * scales[r];
        }
        Ok(Self { x, y, provenance: Provenance::Whitened { row_scales: Some(scales) } })
    }

    /// Whitens against a full SPD error covariance `G` by applying the
    /// symmetric inverse square root `G^(-1/2)` (from the
    /// eigendecomposition of `G`) to the design and the response.
    pub fn whiten_full(&self, g: &DenseMatrix<T>) -> Result<Self> {
        if g.rows() != self.n() || g.cols() != self.n() {
            return Err(Error::DimensionMismatch(
                "error covariance must be n x n".into(),
            ));
        }
        let eig = sym_eig(g)?;
        if !eig.eigenvalues.iter().all(|&l| l > T::zero()) {
            return Err(Error::RankDeficient(
                "error covariance is not positive definite".into(),
            ));
        }
        // G^(-1/2) = V diag(1/sqrt(lambda)) Vᵀ
        let n = self.n();
        let v = &eig.eigenvectors;
        let mut w = DenseMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                let mut acc = T::zero();
                for j in 0..n {
                    acc += v.get(r, j) * v.get(c, j) / eig.eigenvalues[j].sqrt();
                }
                w.set(r, c, acc);
            }
        }
        let x = w.matmul(&self.x)?;
        let y = w.matvec(&self.y)?;
        Ok(Self { x, y, provenance: Provenance::Whitened { row_scales: None } })
    }

    /// Ordinary least squares on this problem.
    pub fn ols_fit(&self) -> Result<OlsFit<T>> {
        if self.n() <= self.k() {
            return Err(Error::InsufficientDof { n: self.n(), k: self.k() });
        }
        let (gram_inverse, gram_inverse_eig) = gram_inverse_eig(&self.x)?;
        let xty = self.x.transpose_matvec(&self.y)?;
        let b = gram_inverse.matvec(&xty)?;
        let fitted = self.x.matvec(&b)?;
        let residuals: Vec<T> =
            self.y.iter().zip(&fitted).map(|(&y, &f)| y - f).collect();
        let sse = dot(&residuals, &residuals);
        let dof = T::from_count(self.n() - self.k());
        let s = (sse / dof).sqrt();
        Ok(OlsFit {
            b,
            residuals,
            sse,
            s,
            n: self.n(),
            k: self.k(),
            gram_inverse,
            gram_inverse_eig,
        })
    }
}

/// An ordinary least-squares fit together with the spectral data of
/// `(XᵀX)⁻¹` that the second stage consumes.
#[derive(Debug, Clone)]
pub struct OlsFit<T> {
    /// Coefficient estimates.
    pub b: Vec<T>,
    /// Residual vector `y - Xb`.
    pub residuals: Vec<T>,
    /// Residual sum of squares.
    pub sse: T,
    /// Residual standard deviation `sqrt(sse / (n - k))`.
    pub s: T,
    pub n: usize,
    pub k: usize,
    /// `(XᵀX)⁻¹`.
    pub gram_inverse: DenseMatrix<T>,
    /// Eigendecomposition of `(XᵀX)⁻¹`, eigenvalues descending.
    pub gram_inverse_eig: SymEigResult<T>,
}

impl<T: Scalar> OlsFit<T> {
    pub fn dof(&self) -> usize {
        self.n - self.k
    }
}

/// Known truth for oracle selection in simulations.
#[derive(Debug, Clone)]
pub struct OracleContext<T> {
    pub beta_true: Vec<T>,
    pub sigma_true: T,
}

/// Converts a probable error (median absolute deviation of a normal law)
/// to a standard deviation.
pub fn sigma_from_probable_error<T: Scalar>(probable_error: T) -> Result<T> {
    if !(probable_error.is_finite() && probable_error > T::zero()) {
        return Err(Error::InvalidParameter("probable error must be positive".into()));
    }
    Ok(probable_error / T::from_f64_c(PROBABLE_ERROR_RATIO))
}

/// Mean squared distance of the OLS estimate from the truth:
/// `sigma² · Σ eigenvalues of (XᵀX)⁻¹`.
pub fn ols_risk<T: Scalar>(eig: &SymEigResult<T>, sigma: T) -> Result<T> {
    if !(sigma.is_finite() && sigma > T::zero()) {
        return Err(Error::InvalidParameter("sigma must be positive".into()));
    }
    Ok(sigma * sigma * eig.sum())
}
