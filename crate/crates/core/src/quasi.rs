//! The two-stage quasi-estimator built on top of an OLS fit.
//!
//! Stage one derives two alternative estimates,
//!
//! ```text
//! b± = b ± c·sqrt(eᵀe)·z₁,   c = sqrt(λ₁/π)·Γ((m+1)/2)/Γ((m+2)/2),
//! ```
//!
//! where `m = n − k`, `λ₁` is the top eigenvalue of `(XᵀX)⁻¹`, and `z₁`
//! its (sign-normalized) eigenvector. The coefficient `c` makes the
//! correction magnitude match the conditional expectation of the OLS
//! error projected on `z₁` given the residual sum of squares, so the
//! alternative on the correct side of the truth has strictly smaller
//! mean-squared distance than OLS whenever `λ₁` carries a nontrivial
//! share of the total error. Stage two (see [`crate::selection`]) picks
//! one of the alternatives from prior information; [`oracle_select`]
//! makes the choice with knowledge of the truth and is the benchmark the
//! selection rules are judged against.
//!
//! The module also provides the second-order theory of the selected
//! estimate: its covariance (a rank-one correction of the OLS
//! covariance), its per-component fourth moments, and t/F-based
//! confidence sets built from those quantities.

use crate::cholesky::cholesky;
use crate::eigen::SymEigResult;
use crate::error::{Error, Result};
use crate::matrix::{dot, norm2, DenseMatrix};
use crate::regression::{OlsFit, OracleContext};
use crate::scalar::Scalar;
use crate::special::{f_quantile, ln_gamma, t_quantile};

/// Relative eigenvalue gap below which the correction direction is
/// numerically ill-determined.
const EIGENGAP_WARN_RATIO: f64 = 1e-8;

/// Ratio Γ((m+1)/2) / Γ((m+2)/2), evaluated on the log scale so it stays
/// finite for arbitrarily large degrees of freedom.
fn gamma_ratio<T: Scalar>(dof: usize) -> Result<T> {
    let half = T::from_f64_c(0.5);
    let m = T::from_count(dof);
    Ok((ln_gamma((m + T::one()) * half)? - ln_gamma((m + T::from_f64_c(2.0)) * half)?).exp())
}

/// The fraction of the top eigenvalue removed from the risk by an
/// oracle-selected correction: `(m/π)·Γ²((m+1)/2)/Γ²((m+2)/2)`.
///
/// Tends to `2/π` from below as the degrees of freedom grow.
pub fn risk_discount_factor<T: Scalar>(dof: usize) -> Result<T> {
    if dof == 0 {
        return Err(Error::InsufficientDof { n: 0, k: 0 });
    }
    let r: T = gamma_ratio(dof)?;
    Ok(T::from_count(dof) / T::PI() * r * r)
}

/// Correction coefficient `c = sqrt(λ₁/π) · Γ((m+1)/2)/Γ((m+2)/2)` for a
/// fit with `n` observations, `k` coefficients, and top inverse-Gram
/// eigenvalue `top_eigenvalue`; `m = n − k`.
pub fn correction_coefficient<T: Scalar>(n: usize, k: usize, top_eigenvalue: T) -> Result<T> {
    if k == 0 || n <= k {
        return Err(Error::InsufficientDof { n, k });
    }
    if !(top_eigenvalue.is_finite() && top_eigenvalue > T::zero()) {
        return Err(Error::InvalidParameter("top eigenvalue must be positive".into()));
    }
    Ok((top_eigenvalue / T::PI()).sqrt() * gamma_ratio(n - k)?)
}

/// The pair of first-stage alternatives around an OLS estimate.
#[derive(Debug, Clone)]
pub struct QuasiAlternatives<T> {
    /// `b + correction·direction`.
    pub b_plus: Vec<T>,
    /// `b - correction·direction`.
    pub b_minus: Vec<T>,
    /// Correction magnitude `coefficient · sqrt(sse)`.
    pub correction: T,
    /// The coefficient `c` (residual-independent part of the correction).
    pub coefficient: T,
    /// Top eigenvalue of `(XᵀX)⁻¹`.
    pub top_eigenvalue: T,
    /// Unit correction direction (the sign-normalized top eigenvector).
    pub direction: Vec<T>,
    /// True when the top two eigenvalues are relatively closer than 1e-8,
    /// making the correction direction ill-determined.
    pub near_degenerate: bool,
}

impl<T: Scalar> QuasiAlternatives<T> {
    /// The OLS estimate the pair brackets.
    pub fn midpoint(&self) -> Vec<T> {
        let half = T::from_f64_c(0.5);
        self.b_plus
            .iter()
            .zip(&self.b_minus)
            .map(|(&p, &m)| (p + m) * half)
            .collect()
    }
}

fn shifted<T: Scalar>(b: &[T], direction: &[T], amount: T) -> Vec<T> {
    b.iter().zip(direction).map(|(&bi, &di)| bi + amount * di).collect()
}

/// Builds the alternative pair along a given (non-zero) direction, with
/// the correction coefficient generalized to `sqrt(dᵀ(XᵀX)⁻¹d / π)` times
/// the gamma ratio for a unit direction `d`. With `d = z₁` this reduces
/// to [`alternatives`]; other directions exist to let the dominance
/// property be probed off the optimal axis.
#[doc(hidden)]
pub fn alternatives_along<T: Scalar>(
    fit: &OlsFit<T>,
    direction: &[T],
) -> Result<QuasiAlternatives<T>> {
    if direction.len() != fit.k {
        return Err(Error::DimensionMismatch("direction length must equal k".into()));
    }
    let norm = norm2(direction);
    if !(norm.is_finite() && norm > T::zero()) {
        return Err(Error::InvalidParameter("direction must be non-zero and finite".into()));
    }
    let unit: Vec<T> = direction.iter().map(|&v| v / norm).collect();
    let gd = fit.gram_inverse.matvec(&unit)?;
    let projected_variance = dot(&unit, &gd);
    let coefficient =
        (projected_variance / T::PI()).sqrt() * gamma_ratio::<T>(fit.dof())?;
    let correction = coefficient * fit.sse.sqrt();
    Ok(QuasiAlternatives {
        b_plus: shifted(&fit.b, &unit, correction),
        b_minus: shifted(&fit.b, &unit, -correction),
        correction,
        coefficient,
        top_eigenvalue: projected_variance,
        direction: unit,
        near_degenerate: false,
    })
}

/// The two first-stage alternatives `b ± c·sqrt(sse)·z₁`.
///
/// With zero residuals both alternatives coincide with the OLS estimate.
pub fn alternatives<T: Scalar>(fit: &OlsFit<T>) -> Result<QuasiAlternatives<T>> {
    let eig = &fit.gram_inverse_eig;
    let top = eig.top_value();
    let coefficient = correction_coefficient(fit.n, fit.k, top)?;
    let correction = coefficient * fit.sse.sqrt();
    let direction = eig.top_vector();
    let near_degenerate = eig.dim() > 1
        && eig.eigenvalues[0] - eig.eigenvalues[1]
            < T::from_f64_c(EIGENGAP_WARN_RATIO) * eig.eigenvalues[0];
    Ok(QuasiAlternatives {
        b_plus: shifted(&fit.b, &direction, correction),
        b_minus: shifted(&fit.b, &direction, -correction),
        correction,
        coefficient,
        top_eigenvalue: top,
        direction,
        near_degenerate,
    })
}

/// Selects the alternative on the correct side of the truth:
/// `b − sign(dᵀ(b − β))·correction·d`, with `sign(0) = +1`.
///
/// Requires knowledge of the true coefficients, so this is a benchmark
/// for simulations, not an operational estimator.
pub fn oracle_select<T: Scalar>(
    alts: &QuasiAlternatives<T>,
    fit: &OlsFit<T>,
    oracle: &OracleContext<T>,
) -> Result<Vec<T>> {
    if oracle.beta_true.len() != fit.k {
        return Err(Error::DimensionMismatch(
            "oracle truth length must equal the coefficient count".into(),
        ));
    }
    let delta: Vec<T> =
        fit.b.iter().zip(&oracle.beta_true).map(|(&b, &t)| b - t).collect();
    let projection = dot(&alts.direction, &delta);
    // sign(0) = +1 keeps the selection deterministic on the null set.
    Ok(if projection >= T::zero() {
        alts.b_minus.clone()
    } else {
        alts.b_plus.clone()
    })
}

/// Exact and large-sample risk ratios of the oracle-selected estimate
/// relative to OLS.
#[derive(Debug, Clone, Copy)]
pub struct EfficiencyRatio<T> {
    /// `1 − (m/π)·Γ²((m+1)/2)/Γ²((m+2)/2) · λ₁/Σλᵢ`.
    pub exact: T,
    /// `1 − (2/π)(1 − 0.25/m)² · λ₁/Σλᵢ`.
    pub asymptotic: T,
}

/// Risk ratio of the oracle-selected estimate to OLS for a design whose
/// inverse Gram matrix has the given spectrum. Both variants lie in
/// (0, 1): the selected estimate always beats OLS, and the gain grows
/// with the share of the top eigenvalue (strong collinearity).
pub fn efficiency_ratio<T: Scalar>(
    eig: &SymEigResult<T>,
    n: usize,
    k: usize,
) -> Result<EfficiencyRatio<T>> {
    if k == 0 || n <= k {
        return Err(Error::InsufficientDof { n, k });
    }
    if eig.dim() != k {
        return Err(Error::DimensionMismatch("spectrum dimension must equal k".into()));
    }
    if !eig.eigenvalues.iter().all(|&l| l.is_finite() && l > T::zero()) {
        return Err(Error::InvalidParameter("eigenvalues must be positive".into()));
    }
    let share = eig.top_value() / eig.sum();
    let m = n - k;
    let exact = T::one() - risk_discount_factor::<T>(m)? * share;
    let mf = T::from_count(m);
    let quarter = T::from_f64_c(0.25);
    let two_over_pi = T::from_f64_c(2.0) / T::PI();
    let adj = T::one() - quarter / mf;
    let asymptotic = T::one() - two_over_pi * adj * adj * share;
    Ok(EfficiencyRatio { exact, asymptotic })
}

/// Covariance of the oracle-selected estimate.
#[derive(Debug, Clone)]
pub struct QuasiCovariance<T> {
    /// `σ²·[(XᵀX)⁻¹ − f·λ₁·z₁z₁ᵀ]` with `f` the risk discount factor.
    pub q: DenseMatrix<T>,
    /// Eigenvalue of `q` along `z₁`: `σ²·λ₁·(1 − f)`, strictly below
    /// `σ²·λ₁`.
    pub top_eigenvalue: T,
    /// Remaining eigenvalues, unchanged from `σ²·(XᵀX)⁻¹`.
    pub shared_eigenvalues: Vec<T>,
}

/// Covariance matrix of the oracle-selected estimate. With `sigma = 1`
/// this is the design-only matrix used for intervals and regions.
pub fn quasi_covariance<T: Scalar>(fit: &OlsFit<T>, sigma: T) -> Result<QuasiCovariance<T>> {
    if !(sigma.is_finite() && sigma > T::zero()) {
        return Err(Error::InvalidParameter("sigma must be positive".into()));
    }
    let eig = &fit.gram_inverse_eig;
    let f = risk_discount_factor::<T>(fit.dof())?;
    let lambda1 = eig.top_value();
    let z1 = eig.top_vector();
    let s2 = sigma * sigma;
    let mut q = DenseMatrix::zeros(fit.k, fit.k);
    for r in 0..fit.k {
        for c in 0..fit.k {
            let v = s2 * (fit.gram_inverse.get(r, c) - f * lambda1 * z1[r] * z1[c]);
            q.set(r, c, v);
        }
    }
    Ok(QuasiCovariance {
        q,
        top_eigenvalue: s2 * lambda1 * (T::one() - f),
        shared_eigenvalues: eig.eigenvalues[1..].iter().map(|&l| s2 * l).collect(),
    })
}

/// Fourth central moment of one component of the selected estimate.
#[derive(Debug, Clone, Copy)]
pub struct FourthMomentReport<T> {
    /// Zero-based component index.
    pub component: usize,
    /// Fourth central moment.
    pub mu4: T,
    /// Variance of the component (the matching diagonal entry of the
    /// covariance).
    pub variance: T,
    /// `mu4 / variance² − 3`; zero for a normal law. Positive but at most
    /// about 1 for the selected estimate, reflecting the two-sided
    /// correction.
    pub kurtosis_excess: T,
    /// Squared norm of the component's loading on the non-corrected
    /// eigendirections: `Σ_{i≥2} λᵢ·zᵢ(j)²`.
    pub residual_direction_weight: T,
}

/// Closed-form fourth central moment of component `component` of the
/// oracle-selected estimate under normal errors with scale `sigma`.
pub fn fourth_moment<T: Scalar>(
    fit: &OlsFit<T>,
    sigma: T,
    component: usize,
) -> Result<FourthMomentReport<T>> {
    if component >= fit.k {
        return Err(Error::DimensionMismatch(format!(
            "component {component} out of range for k = {}",
            fit.k
        )));
    }
    if !(sigma.is_finite() && sigma > T::zero()) {
        return Err(Error::InvalidParameter("sigma must be positive".into()));
    }
    let eig = &fit.gram_inverse_eig;
    let m = fit.dof();
    let mf = T::from_count(m);
    let lambda1 = eig.top_value();
    let z1j = eig.eigenvectors.get(component, 0);
    let c = correction_coefficient(fit.n, fit.k, lambda1)?;
    let c2 = c * c;

    // Loading of the component on the uncorrected directions. For unit
    // eigenvectors of (XᵀX)⁻¹ the aggregate Σ_{i≥2} λᵢ zᵢ(j) · X zᵢ has
    // squared norm Σ_{i≥2} λᵢ zᵢ(j)², because zᵢᵀXᵀXzₗ = δᵢₗ/λₗ.
    let mut rest = T::zero();
    for i in 1..fit.k {
        let zij = eig.eigenvectors.get(component, i);
        rest += eig.eigenvalues[i] * zij * zij;
    }

    let three = T::from_f64_c(3.0);
    let two = T::from_f64_c(2.0);
    let six = T::from_f64_c(6.0);
    let z2 = z1j * z1j;
    let quartic = z2 * z2
        * (three * lambda1 * lambda1
            - two * mf * lambda1 * c2
            - mf * (three * mf + two) * c2 * c2);
    let cross = six * z2 * (lambda1 - mf * c2) * rest;
    let tail = three * rest * rest;
    let s2 = sigma * sigma;
    let mu4 = s2 * s2 * (quartic + cross + tail);

    let variance = s2 * (z2 * (lambda1 - mf * c2) + rest);
    Ok(FourthMomentReport {
        component,
        mu4,
        variance,
        kurtosis_excess: mu4 / (variance * variance) - three,
        residual_direction_weight: rest,
    })
}

/// Two-sided confidence interval for one component.
#[derive(Debug, Clone, Copy)]
pub struct ConfidenceInterval<T> {
    pub center: T,
    pub half_width: T,
}

impl<T: Scalar> ConfidenceInterval<T> {
    pub fn lower(&self) -> T {
        self.center - self.half_width
    }

    pub fn upper(&self) -> T {
        self.center + self.half_width
    }
}

fn check_alpha<T: Scalar>(alpha: T, allow_one: bool) -> Result<()> {
    let ok = alpha > T::zero() && (if allow_one { alpha <= T::one() } else { alpha < T::one() });
    if !ok {
        return Err(Error::InvalidParameter(format!(
            "confidence level alpha must lie in (0, 1), got {alpha}"
        )));
    }
    Ok(())
}

/// Level `1 − alpha` interval for component `component` of an estimate:
/// `estimate[j] ± t(m, 1 − alpha/2) · sqrt(Q̄_jj) · s`, where `Q̄` is the
/// design-only covariance of the selected estimate. Never wider than the
/// OLS interval for the same component.
pub fn confidence_interval<T: Scalar>(
    estimate: &[T],
    fit: &OlsFit<T>,
    component: usize,
    alpha: T,
) -> Result<ConfidenceInterval<T>> {
    check_alpha(alpha, true)?;
    if estimate.len() != fit.k || component >= fit.k {
        return Err(Error::DimensionMismatch(
            "estimate length and component must match the fit".into(),
        ));
    }
    let design_cov = quasi_covariance(fit, T::one())?;
    let p = T::one() - alpha * T::from_f64_c(0.5);
    let t = t_quantile(fit.dof(), p)?;
    Ok(ConfidenceInterval {
        center: estimate[component],
        half_width: t * design_cov.q.get(component, component).sqrt() * fit.s,
    })
}

/// Ellipsoidal joint confidence region
/// `{β : (β − center)ᵀ Q̄⁻¹ (β − center) ≤ radius}` with
/// `radius = k·s²·F(k, m, 1 − alpha)` and `Q̄` the design-only covariance
/// of the selected estimate (stored in `shape`).
#[derive(Debug, Clone)]
pub struct JointRegion<T> {
    pub center: Vec<T>,
    /// Design-only covariance shape `Q̄`; the membership form uses its
    /// inverse, exactly as the OLS region uses `XᵀX`, the inverse of the
    /// OLS design covariance.
    pub shape: DenseMatrix<T>,
    pub radius: T,
}

impl<T: Scalar> JointRegion<T> {
    /// Whether `point` lies in the region.
    pub fn contains(&self, point: &[T]) -> Result<bool> {
        if point.len() != self.center.len() {
            return Err(Error::DimensionMismatch("point dimension mismatch".into()));
        }
        let d: Vec<T> = point.iter().zip(&self.center).map(|(&p, &c)| p - c).collect();
        let u = cholesky(&self.shape)?.solve_vec(&d)?;
        Ok(dot(&d, &u) <= self.radius)
    }
}

/// Joint confidence region at level `1 − alpha` centered at an estimate.
pub fn joint_region<T: Scalar>(
    estimate: &[T],
    fit: &OlsFit<T>,
    alpha: T,
) -> Result<JointRegion<T>> {
    check_alpha(alpha, false)?;
    if estimate.len() != fit.k {
        return Err(Error::DimensionMismatch(
            "estimate length must match the fit".into(),
        ));
    }
    let design_cov = quasi_covariance(fit, T::one())?;
    let f = f_quantile(fit.k, fit.dof(), T::one() - alpha)?;
    Ok(JointRegion {
        center: estimate.to_vec(),
        shape: design_cov.q,
        radius: T::from_count(fit.k) * fit.s * fit.s * f,
    })
}
