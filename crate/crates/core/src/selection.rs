//! Stage-two selection: picking one estimate from the alternative pair
//! using prior information, without knowledge of the truth.
//!
//! Three families of prior information are supported:
//!
//! * **sign constraints** — each coefficient is known positive, negative,
//!   or unconstrained; the alternative satisfying every constraint wins;
//! * **range constraints** — each coefficient is known to lie in a closed
//!   interval; same exactly-one-survivor logic;
//! * **box rules** (single coefficient) — the estimate is forced into
//!   `[a₁, a₂]` either by plain clamping ([`ols_box`]) or by the staged
//!   rule [`quasi_box`] that prefers whichever alternative already lies
//!   inside the box.
//!
//! Sign and range selection can be ambiguous (both or neither alternative
//! qualifies); the returned [`Decision`] says so instead of guessing.

use crate::error::{Error, Result};
use crate::quasi::QuasiAlternatives;
use crate::scalar::Scalar;
use crate::special::laplace_phi;
use serde::{Deserialize, Serialize};
use std::str::FromStr;

/// Prior knowledge about the sign of one coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignConstraint {
    /// Coefficient is known to be strictly positive.
    Positive,
    /// Coefficient is known to be strictly negative.
    Negative,
    /// No sign information.
    Free,
}

impl FromStr for SignConstraint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+" | "pos" | "positive" => Ok(SignConstraint::Positive),
            "-" | "neg" | "negative" => Ok(SignConstraint::Negative),
            "." | "free" | "any" => Ok(SignConstraint::Free),
            other => Err(Error::InvalidRule(format!(
                "unknown sign constraint {other:?}; expected +, -, or ."
            ))),
        }
    }
}

impl SignConstraint {
    fn admits<T: Scalar>(self, value: T) -> bool {
        match self {
            SignConstraint::Positive => value > T::zero(),
            SignConstraint::Negative => value < T::zero(),
            SignConstraint::Free => true,
        }
    }
}

/// A closed interval; bounds may be infinite but not NaN.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval<T> {
    pub lower: T,
    pub upper: T,
}

impl<T: Scalar> Interval<T> {
    pub fn new(lower: T, upper: T) -> Result<Self> {
        if lower.is_nan() || upper.is_nan() || lower > upper {
            return Err(Error::InvalidParameter(format!(
                "invalid interval [{lower}, {upper}]"
            )));
        }
        Ok(Interval { lower, upper })
    }

    pub fn contains(&self, value: T) -> bool {
        self.lower <= value && value <= self.upper
    }

    /// Clamp `value` into the interval.
    pub fn clamp(&self, value: T) -> T {
        if value < self.lower {
            self.lower
        } else if value > self.upper {
            self.upper
        } else {
            value
        }
    }
}

/// Which estimate a selection produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecisionSource {
    /// The `b + correction·direction` alternative.
    AltPlus,
    /// The `b − correction·direction` alternative.
    AltMinus,
    /// The unmodified least-squares estimate.
    Ols,
    /// The lower box bound.
    ClampLow,
    /// The upper box bound.
    ClampHigh,
}

/// Outcome of a stage-two selection.
#[derive(Debug, Clone)]
pub struct Decision<T> {
    /// The selected coefficient vector, or `None` when the prior
    /// information cannot discriminate.
    pub chosen: Option<Vec<T>>,
    pub source: Option<DecisionSource>,
    /// Human-readable explanation of the outcome.
    pub rationale: String,
}

impl<T> Decision<T> {
    pub fn is_ambiguous(&self) -> bool {
        self.chosen.is_none()
    }
}

fn resolve<T: Scalar>(
    alts: &QuasiAlternatives<T>,
    plus_ok: bool,
    minus_ok: bool,
    what: &str,
) -> Decision<T> {
    match (plus_ok, minus_ok) {
        (true, false) => Decision {
            chosen: Some(alts.b_plus.clone()),
            source: Some(DecisionSource::AltPlus),
            rationale: format!("only the plus alternative satisfies the {what}"),
        },
        (false, true) => Decision {
            chosen: Some(alts.b_minus.clone()),
            source: Some(DecisionSource::AltMinus),
            rationale: format!("only the minus alternative satisfies the {what}"),
        },
        (true, true) => Decision {
            chosen: None,
            source: None,
            rationale: format!("both alternatives satisfy the {what}; cannot discriminate"),
        },
        (false, false) => Decision {
            chosen: None,
            source: None,
            rationale: format!("neither alternative satisfies the {what}"),
        },
    }
}

/// Select the alternative whose coefficients all carry the stated signs.
pub fn choose_by_signs<T: Scalar>(
    alts: &QuasiAlternatives<T>,
    constraints: &[SignConstraint],
) -> Result<Decision<T>> {
    if constraints.len() != alts.direction.len() {
        return Err(Error::DimensionMismatch(
            "one sign constraint per coefficient is required".into(),
        ));
    }
    let ok = |v: &[T]| v.iter().zip(constraints).all(|(&x, c)| c.admits(x));
    Ok(resolve(alts, ok(&alts.b_plus), ok(&alts.b_minus), "sign constraints"))
}

/// Select the alternative whose coefficients all lie in the stated
/// closed intervals.
pub fn choose_by_range<T: Scalar>(
    alts: &QuasiAlternatives<T>,
    ranges: &[Interval<T>],
) -> Result<Decision<T>> {
    if ranges.len() != alts.direction.len() {
        return Err(Error::DimensionMismatch(
            "one interval per coefficient is required".into(),
        ));
    }
    let ok = |v: &[T]| v.iter().zip(ranges).all(|(&x, r)| r.contains(x));
    Ok(resolve(alts, ok(&alts.b_plus), ok(&alts.b_minus), "range constraints"))
}

/// Box-constrained least squares for one coefficient: clamp into the box.
pub fn ols_box<T: Scalar>(b: T, bounds: &Interval<T>) -> T {
    bounds.clamp(b)
}

/// Result of the staged box rule.
#[derive(Debug, Clone, Copy)]
pub struct BoxDecision<T> {
    pub value: T,
    pub source: DecisionSource,
}

/// Staged box rule for one coefficient with alternatives
/// `b₁ = b − correction` and `b₂ = b + correction`:
///
/// * `b` left of the box: take `b₂` if it lies inside, else the lower
///   bound;
/// * `b` right of the box: take `b₁` if it lies inside, else the upper
///   bound;
/// * `b` inside: take the one alternative that is also inside, or keep
///   `b` itself when both or neither are.
///
/// Always lands inside the box, and degenerates to [`ols_box`] when the
/// correction is zero. Interval membership is closed, so an alternative
/// sitting exactly on a bound counts as inside.
pub fn quasi_box<T: Scalar>(b: T, correction: T, bounds: &Interval<T>) -> Result<BoxDecision<T>> {
    if !b.is_finite() || !correction.is_finite() || correction < T::zero() {
        return Err(Error::InvalidParameter(
            "estimate must be finite and the correction non-negative".into(),
        ));
    }
    let b1 = b - correction;
    let b2 = b + correction;
    let d = if b < bounds.lower {
        if bounds.contains(b2) {
            BoxDecision { value: b2, source: DecisionSource::AltPlus }
        } else {
            BoxDecision { value: bounds.lower, source: DecisionSource::ClampLow }
        }
    } else if b > bounds.upper {
        if bounds.contains(b1) {
            BoxDecision { value: b1, source: DecisionSource::AltMinus }
        } else {
            BoxDecision { value: bounds.upper, source: DecisionSource::ClampHigh }
        }
    } else {
        match (bounds.contains(b1), bounds.contains(b2)) {
            (true, false) => BoxDecision { value: b1, source: DecisionSource::AltMinus },
            (false, true) => BoxDecision { value: b2, source: DecisionSource::AltPlus },
            // Both inside (no basis to move) or both outside (the box is
            // narrower than the pair): keep the least-squares estimate.
            _ => BoxDecision { value: b, source: DecisionSource::Ols },
        }
    };
    Ok(d)
}

/// Apply [`quasi_box`] to a single-coefficient alternative pair,
/// reporting the choice as a [`Decision`].
pub fn choose_by_box<T: Scalar>(
    alts: &QuasiAlternatives<T>,
    bounds: &Interval<T>,
) -> Result<Decision<T>> {
    if alts.direction.len() != 1 {
        return Err(Error::InvalidRule(
            "box selection applies to a single coefficient only".into(),
        ));
    }
    let half = T::from_f64_c(0.5);
    let b = (alts.b_plus[0] + alts.b_minus[0]) * half;
    let d = quasi_box(b, alts.correction, bounds)?;
    // With a negative unit direction the plus alternative is the lower
    // value; relabel so the source names the struct field actually used.
    let flipped = alts.direction[0] < T::zero();
    let source = match d.source {
        DecisionSource::AltPlus if flipped => DecisionSource::AltMinus,
        DecisionSource::AltMinus if flipped => DecisionSource::AltPlus,
        s => s,
    };
    let rationale = match source {
        DecisionSource::AltPlus => "kept the plus alternative inside the box",
        DecisionSource::AltMinus => "kept the minus alternative inside the box",
        DecisionSource::Ols => "kept the least-squares estimate",
        DecisionSource::ClampLow => "clamped to the lower bound",
        DecisionSource::ClampHigh => "clamped to the upper bound",
    };
    Ok(Decision {
        chosen: Some(vec![d.value]),
        source: Some(source),
        rationale: rationale.into(),
    })
}

/// Exact risk `E[(clamp(b, a₁, a₂) − β)²]` of the clamped estimator when
/// `b ~ Normal(β, σ̃²)`, in terms of the standardized bounds
/// `c₁ = (a₁ − β)/σ̃ ≤ 0` and `c₂ = (a₂ − β)/σ̃ ≥ 0`:
///
/// ```text
/// σ̃²·[Φ(c₂) − Φ(c₁) − c₂φ(c₂) + c₁φ(c₁) + c₁²Φ(c₁) + c₂²(1 − Φ(c₂))]
/// ```
///
/// with Φ and φ the standard normal distribution and density. Infinite
/// bounds are handled (their boundary terms vanish); `c₁ = c₂ = 0`
/// yields zero (the estimator is pinned to the truth) and
/// `c₁ → −∞, c₂ → ∞` recovers the unclamped variance `σ̃²`.
pub fn box_risk_analytic<T: Scalar>(sigma_tilde: T, c1: T, c2: T) -> Result<T> {
    if !(sigma_tilde.is_finite() && sigma_tilde > T::zero()) {
        return Err(Error::InvalidParameter("sigma must be positive".into()));
    }
    if c1.is_nan() || c2.is_nan() || c1 > T::zero() || c2 < T::zero() {
        return Err(Error::InvalidParameter(
            "standardized bounds must satisfy c1 <= 0 <= c2".into(),
        ));
    }
    let half = T::from_f64_c(0.5);
    let sqrt2 = T::from_f64_c(2.0).sqrt();
    let norm_cdf = |z: T| half * (T::one() + laplace_phi(z / sqrt2));
    let norm_pdf =
        |z: T| (-(z * z) * half).exp() / (T::from_f64_c(2.0) * T::PI()).sqrt();

    // Boundary terms z·φ(z) and z²·Φ(z) vanish in the infinite limits but
    // evaluate as ∞·0 if taken literally.
    let lower_terms = if c1.is_infinite() {
        T::zero()
    } else {
        c1 * norm_pdf(c1) + c1 * c1 * norm_cdf(c1)
    };
    let upper_terms = if c2.is_infinite() {
        T::zero()
    } else {
        -c2 * norm_pdf(c2) + c2 * c2 * (T::one() - norm_cdf(c2))
    };
    let phi_lo = if c1.is_infinite() { T::zero() } else { norm_cdf(c1) };
    let phi_hi = if c2.is_infinite() { T::one() } else { norm_cdf(c2) };
    Ok(sigma_tilde * sigma_tilde * (phi_hi - phi_lo + lower_terms + upper_terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RandomStream;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn pair(b: Vec<f64>, correction: f64, direction: Vec<f64>) -> QuasiAlternatives<f64> {
        let b_plus =
            b.iter().zip(&direction).map(|(x, d)| x + correction * d).collect();
        let b_minus =
            b.iter().zip(&direction).map(|(x, d)| x - correction * d).collect();
        QuasiAlternatives {
            b_plus,
            b_minus,
            correction,
            coefficient: correction,
            top_eigenvalue: 1.0,
            direction,
            near_degenerate: false,
        }
    }

    #[test]
    fn sign_constraint_parsing() {
        assert_eq!("+".parse::<SignConstraint>().unwrap(), SignConstraint::Positive);
        assert_eq!("negative".parse::<SignConstraint>().unwrap(), SignConstraint::Negative);
        assert_eq!(" . ".parse::<SignConstraint>().unwrap(), SignConstraint::Free);
        assert!("±".parse::<SignConstraint>().is_err());
    }

    #[test]
    fn signs_pick_the_unique_qualifying_alternative() {
        // Two coefficients known to be (+, -): only the plus alternative
        // has that pattern.
        let alts = pair(vec![-0.29, 7.96], 30.8, vec![0.707, -0.707]);
        assert!(alts.b_plus[0] > 0.0 && alts.b_plus[1] < 0.0);
        let d = choose_by_signs(
            &alts,
            &[SignConstraint::Positive, SignConstraint::Negative],
        )
        .unwrap();
        assert_eq!(d.source, Some(DecisionSource::AltPlus));
        assert_eq!(d.chosen.as_deref(), Some(&alts.b_plus[..]));
        assert!(!d.is_ambiguous());
    }

    #[test]
    fn signs_report_ambiguity_both_ways() {
        let alts = pair(vec![5.0], 1.0, vec![1.0]);
        let both = choose_by_signs(&alts, &[SignConstraint::Positive]).unwrap();
        assert!(both.is_ambiguous());
        assert!(both.rationale.contains("both"));
        let neither = choose_by_signs(&alts, &[SignConstraint::Negative]).unwrap();
        assert!(neither.is_ambiguous());
        assert!(neither.rationale.contains("neither"));
        assert!(choose_by_signs(&alts, &[]).is_err());
    }

    #[test]
    fn free_constraints_never_discriminate() {
        let alts = pair(vec![1.0, -2.0], 0.5, vec![0.6, 0.8]);
        let d = choose_by_signs(&alts, &[SignConstraint::Free, SignConstraint::Free])
            .unwrap();
        assert!(d.is_ambiguous());
    }

    #[test]
    fn range_selection_keeps_the_inside_alternative() {
        // Location estimate with alternatives 2.005 and 1.786; admissible
        // range [0, 1.9] excludes the upper one.
        let alts = pair(vec![1.8957], 0.10942, vec![1.0]);
        let d =
            choose_by_range(&alts, &[Interval::new(0.0, 1.9).unwrap()]).unwrap();
        assert_eq!(d.source, Some(DecisionSource::AltMinus));
        assert!(close(d.chosen.unwrap()[0], 1.8957 - 0.10942, 1e-12));

        let wide = choose_by_range(&alts, &[Interval::new(0.0, 3.0).unwrap()]).unwrap();
        assert!(wide.is_ambiguous());
    }

    #[test]
    fn interval_validation_and_clamp() {
        assert!(Interval::new(2.0, 1.0).is_err());
        assert!(Interval::new(f64::NAN, 1.0).is_err());
        let i = Interval::new(-1.0, 1.0).unwrap();
        assert_eq!(i.clamp(-3.0), -1.0);
        assert_eq!(i.clamp(0.25), 0.25);
        assert_eq!(i.clamp(9.0), 1.0);
        let unbounded = Interval::new(f64::NEG_INFINITY, f64::INFINITY).unwrap();
        assert_eq!(ols_box(42.0, &unbounded), 42.0);
    }

    #[test]
    fn quasi_box_case_table() {
        let bounds = Interval::new(-1.0, 1.0).unwrap();
        // (b, correction, expected value, expected source)
        let cases: &[(f64, f64, f64, DecisionSource)] = &[
            // b inside, one alternative sticks out
            (0.5, 0.7, -0.2, DecisionSource::AltMinus),
            (-0.5, 0.7, 0.2, DecisionSource::AltPlus),
            // b inside, both in or both out
            (0.2, 0.3, 0.2, DecisionSource::Ols),
            (0.0, 5.0, 0.0, DecisionSource::Ols),
            // b below the box
            (-2.0, 1.5, -0.5, DecisionSource::AltPlus),
            (-2.0, 0.5, -1.0, DecisionSource::ClampLow),
            (-2.0, 9.0, -1.0, DecisionSource::ClampLow),
            // b above the box
            (2.0, 1.5, 0.5, DecisionSource::AltMinus),
            (2.0, 0.5, 1.0, DecisionSource::ClampHigh),
            (2.0, 9.0, 1.0, DecisionSource::ClampHigh),
            // zero correction degenerates to the clamp
            (2.0, 0.0, 1.0, DecisionSource::ClampHigh),
            (-3.0, 0.0, -1.0, DecisionSource::ClampLow),
            (0.3, 0.0, 0.3, DecisionSource::Ols),
        ];
        for &(b, corr, want, src) in cases {
            let d = quasi_box(b, corr, &bounds).unwrap();
            assert!(
                close(d.value, want, 1e-14) && d.source == src,
                "b={b} corr={corr}: got ({}, {:?})",
                d.value,
                d.source
            );
        }
        assert!(quasi_box(f64::NAN, 1.0, &bounds).is_err());
        assert!(quasi_box(0.0, -1.0, &bounds).is_err());
    }

    #[test]
    fn quasi_box_grid_is_total_and_lands_inside() {
        let boxes = [(-1.0, 1.0), (-2.0, 0.5), (0.0, 2.0), (-0.25, 0.25)];
        for &(a1, a2) in &boxes {
            let bounds = Interval::new(a1, a2).unwrap();
            for ib in 0..61 {
                let b = -3.0 + 0.1 * ib as f64;
                for &corr in &[0.0, 0.05, 0.3, 0.8, 1.7, 4.0] {
                    let d = quasi_box(b, corr, &bounds).unwrap();
                    let b1 = b - corr;
                    let b2 = b + corr;
                    assert!(bounds.contains(d.value), "escaped the box");
                    assert!(
                        [b, b1, b2, a1, a2].iter().any(|&c| close(d.value, c, 1e-12)),
                        "value {} not among the candidates",
                        d.value
                    );
                    // When the whole pair sits outside on one side, the
                    // staged rule and the plain clamp agree.
                    if (b2 < a1) || (b1 > a2) {
                        assert!(close(d.value, ols_box(b, &bounds), 1e-14));
                    }
                }
            }
        }
    }

    #[test]
    fn box_decision_wrapper_checks_dimension_and_labels() {
        let alts = pair(vec![2.0], 1.5, vec![1.0]);
        let bounds = Interval::new(-1.0, 1.0).unwrap();
        let d = choose_by_box(&alts, &bounds).unwrap();
        assert_eq!(d.source, Some(DecisionSource::AltMinus));
        assert!(close(d.chosen.unwrap()[0], 0.5, 1e-14));

        // A negative unit direction swaps which field holds the lower
        // value; the reported source follows the field.
        let swapped = pair(vec![2.0], 1.5, vec![-1.0]);
        let d = choose_by_box(&swapped, &bounds).unwrap();
        assert_eq!(d.source, Some(DecisionSource::AltPlus));
        assert!(close(d.chosen.unwrap()[0], 0.5, 1e-14));

        let twodim = pair(vec![1.0, 2.0], 0.5, vec![0.6, 0.8]);
        assert!(choose_by_box(&twodim, &bounds).is_err());
    }

    // Simpson quadrature for the risk integrand, fine enough for 1e-10.
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut acc = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(a + h * i as f64);
        }
        acc * h / 3.0
    }

    fn risk_by_quadrature(sigma: f64, c1: f64, c2: f64) -> f64 {
        let pdf = |z: f64| (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
        // E clamp(z)² split at the clamp kinks so each Simpson piece is
        // smooth; tails truncated at ±12 where the density is negligible.
        let lo = c1.max(-12.0);
        let hi = c2.min(12.0);
        let left = c1 * c1 * simpson(&pdf, -12.0, lo, 4000);
        let middle = simpson(&|z: f64| z * z * pdf(z), lo, hi, 4000);
        let right = c2 * c2 * simpson(&pdf, hi, 12.0, 4000);
        sigma * sigma * (left + middle + right)
    }

    #[test]
    fn box_risk_matches_quadrature_oracle() {
        let geometries = [
            (1.0 / 6.0f64, 0.3, 1.7, 1.0),
            (1.0 / 6.0, 0.5, 1.5, 1.0),
            (1.0 / 6.0, 0.8, 1.2, 1.0),
            (1.0 / 6.0, 0.6, 1.7, 1.0),
            (0.5, -2.0, 0.5, -1.0),
        ];
        for &(var, a1, a2, beta) in &geometries {
            let sigma = var.sqrt();
            let c1 = (a1 - beta) / sigma;
            let c2 = (a2 - beta) / sigma;
            let got = box_risk_analytic(sigma, c1, c2).unwrap();
            let want = risk_by_quadrature(sigma, c1, c2);
            assert!(close(got, want, 1e-9), "[{a1},{a2}]: {got} vs {want}");
        }
    }

    #[test]
    fn box_risk_limits() {
        // Pinned box: zero risk.
        assert!(close(box_risk_analytic(1.0, 0.0, 0.0).unwrap(), 0.0, 1e-15));
        // Unbounded box: the unclamped variance, via literal infinities
        // and via large finite bounds.
        let s2 = box_risk_analytic(0.7, f64::NEG_INFINITY, f64::INFINITY).unwrap();
        assert!(close(s2, 0.49, 1e-15));
        let s2 = box_risk_analytic(0.7, -1e3, 1e3).unwrap();
        assert!(close(s2, 0.49, 1e-12));
        assert!(box_risk_analytic(0.0, -1.0, 1.0).is_err());
        assert!(box_risk_analytic(1.0, 0.5, 1.0).is_err());
        assert!(box_risk_analytic(1.0, -1.0, -0.5).is_err());
    }

    #[test]
    fn box_risk_matches_monte_carlo() {
        let mut stream = RandomStream::new(0xB0C5_D00D);
        let sigma = (1.0f64 / 6.0).sqrt();
        let (beta, a1, a2) = (1.0, 0.3, 1.7);
        let n = 200_000;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..n {
            let b = beta + sigma * stream.standard_normal();
            let e = b.clamp(a1, a2) - beta;
            sum += e * e;
            sumsq += e * e * e * e;
        }
        let mean = sum / n as f64;
        let se = ((sumsq / n as f64 - mean * mean) / n as f64).sqrt();
        let analytic =
            box_risk_analytic(sigma, (a1 - beta) / sigma, (a2 - beta) / sigma).unwrap();
        assert!(
            (mean - analytic).abs() < 3.0 * se,
            "mc {mean} vs analytic {analytic} (se {se})"
        );
    }
}
