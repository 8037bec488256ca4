//! Two-stage quasi-estimation for linear regression.
//!
//! Stage one fits ordinary least squares and derives two alternative
//! estimates by shifting the OLS solution along the top eigenvector of
//! `(XᵀX)⁻¹` by a residual-scaled correction. Stage two picks one of the
//! alternatives (or a constrained variant) using prior information such as
//! coefficient signs, admissible ranges, or box bounds. Under collinearity
//! the selected estimate has strictly lower mean-squared risk than OLS.
//!
//! The crate is organized bottom-up:
//!
//! - [`matrix`], [`eigen`], [`cholesky`]: small dense linear algebra
//!   (row-major matrices, cyclic Jacobi eigensolver, SPD factorization).
//! - [`special`]: log-gamma, the scaled error function, and t/F quantiles.
//! - [`rng`]: a fixed, fully deterministic random stream with substreams
//!   plus the error models used by the simulation harness.
//! - [`regression`]: problem construction, centering, whitening, OLS.
//! - [`quasi`]: the correction coefficient, the alternative estimates,
//!   oracle selection, risk ratios, covariance and moments, intervals.
//! - [`selection`]: data-independent selection rules and box estimators.
//! - [`simulation`]: reproducible Monte-Carlo experiments.
//! - [`datasets`]: the two bundled case studies.
//!
//! All numeric code is generic over [`scalar::Scalar`] (implemented for
//! `f32` and `f64`); the aliases below fix the default double-precision
//! instantiation used by the CLI and the simulation harness.

pub mod cholesky;
pub mod datasets;
pub mod eigen;
pub mod error;
pub mod matrix;
pub mod quasi;
pub mod regression;
pub mod rng;
pub mod scalar;
pub mod selection;
pub mod simulation;
pub mod special;

pub use error::{Error, Result};

/// Default double-precision matrix.
pub type Matrix = matrix::DenseMatrix<f64>;
/// Default double-precision eigendecomposition.
pub type EigResult = eigen::SymEigResult<f64>;
/// Default double-precision regression problem.
pub type Problem = regression::RegressionProblem<f64>;
/// Default double-precision OLS fit.
pub type Fit = regression::OlsFit<f64>;
/// Default double-precision alternative pair.
pub type Alternatives = quasi::QuasiAlternatives<f64>;
/// Default double-precision error model.
pub type Errors = rng::ErrorModel<f64>;
