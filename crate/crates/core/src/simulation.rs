//! Deterministic Monte-Carlo experiments over the estimators in this
//! crate: risk comparisons against OLS, box-rule comparisons, and
//! moment-level checks of the selected estimate's sampling law.
//!
//! Reproducibility contract: a given [`ExperimentSpec`] produces a
//! bit-identical report no matter how many worker threads run the
//! replications. Each replication draws from its own counter-derived
//! substream, and aggregation uses compensated summation over fixed-size
//! chunks, so neither scheduling nor thread count can reorder the
//! arithmetic.

use crate::eigen::SymEigResult;
use crate::error::{Error, Result};
use crate::matrix::{dot, DenseMatrix};
use crate::quasi::{
    correction_coefficient, efficiency_ratio, fourth_moment, quasi_covariance,
};
use crate::regression::{build_problem, OlsFit};
use crate::rng::{sample_errors, ErrorModel, RandomStream};
use crate::selection::{ols_box, quasi_box, Interval};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Replications per accumulation chunk. Fixed (not tied to the worker
/// count) so the summation tree is identical under any parallelism.
const CHUNK: usize = 1024;

/// How the design matrix of an experiment is obtained.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DesignSpec {
    /// Use the given matrix, row by row.
    Explicit { matrix: Vec<Vec<f64>> },
    /// A single column of ones (location estimation).
    Ones { n: usize },
    /// A generated two-column centered design with a prescribed sample
    /// correlation between the columns.
    Collinear { n: usize, target_correlation: f64, seed: u64 },
}

impl DesignSpec {
    /// Materialize the design matrix.
    pub fn realize(&self) -> Result<DenseMatrix<f64>> {
        match self {
            DesignSpec::Explicit { matrix } => DenseMatrix::from_rows(matrix),
            DesignSpec::Ones { n } => {
                if *n == 0 {
                    return Err(Error::InvalidParameter("n must be positive".into()));
                }
                Ok(DenseMatrix::column_of_ones(*n))
            }
            DesignSpec::Collinear { n, target_correlation, seed } => {
                gen_collinear_design(*n, *target_correlation, *seed)
            }
        }
    }
}

/// One estimator to evaluate inside an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum EstimatorSpec {
    /// Plain least squares.
    Ols,
    /// The two-alternative estimate resolved with knowledge of the truth.
    QuasiOracle,
    /// Least squares clamped into `[a1, a2]` (single coefficient).
    OlsBox { a1: f64, a2: f64 },
    /// The staged box rule over the alternative pair (single coefficient).
    QuasiBox { a1: f64, a2: f64 },
}

impl EstimatorSpec {
    pub fn label(&self) -> &'static str {
        match self {
            EstimatorSpec::Ols => "ols",
            EstimatorSpec::QuasiOracle => "quasi_oracle",
            EstimatorSpec::OlsBox { .. } => "ols_box",
            EstimatorSpec::QuasiBox { .. } => "quasi_box",
        }
    }

    fn is_box(&self) -> bool {
        matches!(self, EstimatorSpec::OlsBox { .. } | EstimatorSpec::QuasiBox { .. })
    }
}

/// A complete, self-contained experiment description. Serializable so a
/// run can be reproduced from its config alone.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub design: DesignSpec,
    pub beta_true: Vec<f64>,
    pub error_model: ErrorModel<f64>,
    pub replications: usize,
    pub seed: u64,
    pub estimators: Vec<EstimatorSpec>,
}

/// Collinearity diagnostics of a realized design.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DesignSummary {
    pub n: usize,
    pub k: usize,
    /// Ratio of the extreme eigenvalues of `(XᵀX)⁻¹`.
    pub eigen_ratio: f64,
    /// Share of the top eigenvalue in the trace of `(XᵀX)⁻¹`.
    pub top_eigenvalue_share: f64,
    /// Sample correlation of the two centered columns (two-column
    /// designs only).
    pub column_correlation: Option<f64>,
}

/// Monte-Carlo risk of one estimator.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EstimatorRisk {
    pub estimator: String,
    /// Mean squared distance to the truth.
    pub risk: f64,
    pub standard_error: f64,
}

/// Risk ratio between two estimators of the experiment, with the
/// delta-method standard error and, for the oracle/OLS pair, the
/// closed-form values the experiment should approach under normal
/// errors.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RatioSummary {
    pub numerator: String,
    pub denominator: String,
    pub observed: f64,
    pub standard_error: f64,
    pub theoretical_exact: Option<f64>,
    pub theoretical_asymptotic: Option<f64>,
}

/// Full result of a risk experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RiskReport {
    pub design: DesignSummary,
    pub replications: usize,
    pub seed: u64,
    pub risks: Vec<EstimatorRisk>,
    pub ratio: Option<RatioSummary>,
}

/// Observed-versus-predicted moments of the oracle-selected estimate.
///
/// The covariance, projection-variance, and fourth-moment comparisons
/// assume normal errors; the mean (unbiasedness) comparison is valid for
/// any symmetric error law.
#[derive(Debug, Clone, Serialize)]
pub struct MomentChecks {
    pub replications: usize,
    /// Sample mean of the selected estimate, per component.
    pub mean_estimates: Vec<f64>,
    /// Largest standardized deviation of a mean component from the truth.
    pub max_mean_z: f64,
    /// `‖Ĉ − Q‖_F / ‖Q‖_F` for the sample covariance Ĉ.
    pub covariance_rel_frobenius: f64,
    /// Sample variance of the OLS error projected on the top
    /// eigendirection, its predicted value `λ₁σ²`, and the standardized
    /// gap.
    pub projection_variance: f64,
    pub projection_variance_theory: f64,
    pub projection_variance_z: f64,
    /// Per-component fourth central moments, their closed-form values,
    /// and the largest standardized gap.
    pub fourth_moments: Vec<f64>,
    pub fourth_moments_theory: Vec<f64>,
    pub fourth_moment_max_z: f64,
}

/// Generates a centered `n × 2` design whose columns have equal norms
/// and a sample correlation exactly equal to `target_correlation` (up to
/// rounding): the second column is built as
/// `ρ·x̂₁ + sqrt(1 − ρ²)·û` from orthonormalized centered draws.
/// Deterministic in `seed`.
pub fn gen_collinear_design(
    n: usize,
    target_correlation: f64,
    seed: u64,
) -> Result<DenseMatrix<f64>> {
    if n < 3 {
        return Err(Error::InvalidParameter("need at least 3 rows".into()));
    }
    if !(target_correlation.is_finite() && target_correlation.abs() < 1.0) {
        return Err(Error::InvalidParameter(
            "target correlation must lie strictly inside (-1, 1)".into(),
        ));
    }
    let mut stream = RandomStream::new(seed);
    let centered_unit = |stream: &mut RandomStream, reject: &dyn Fn(&[f64]) -> Vec<f64>| {
        for _ in 0..64 {
            let raw: Vec<f64> = (0..n).map(|_| stream.standard_normal()).collect();
            let mean = raw.iter().sum::<f64>() / n as f64;
            let centered: Vec<f64> = raw.iter().map(|v| v - mean).collect();
            let v = reject(&centered);
            let norm = dot(&v, &v).sqrt();
            if norm > 1e-9 {
                return Ok(v.iter().map(|x| x / norm).collect::<Vec<f64>>());
            }
        }
        Err(Error::NoConvergence)
    };
    let x1 = centered_unit(&mut stream, &|v| v.to_vec())?;
    // Remove the x1 component so the second basis vector is orthogonal.
    let x1_ref = x1.clone();
    let u = centered_unit(&mut stream, &move |v| {
        let proj = dot(v, &x1_ref);
        v.iter().zip(&x1_ref).map(|(a, b)| a - proj * b).collect()
    })?;
    let rho = target_correlation;
    let mix = (1.0 - rho * rho).sqrt();
    let scale = (n as f64).sqrt();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| vec![scale * x1[i], scale * (rho * x1[i] + mix * u[i])])
        .collect();
    DenseMatrix::from_rows(&rows)
}

/// Neumaier compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
struct Compensated {
    sum: f64,
    residue: f64,
}

impl Compensated {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.residue += (self.sum - t) + v;
        } else {
            self.residue += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(self) -> f64 {
        self.sum + self.residue
    }
}

/// Runs `f` for every replication index and returns the per-slot sums of
/// the records it fills in. Deterministic under any worker count: chunks
/// have a fixed size, each is summed sequentially, and chunk totals are
/// folded in index order.
fn accumulate<F>(replications: usize, width: usize, f: F) -> Vec<f64>
where
    F: Fn(usize, &mut [f64]) + Sync,
{
    let starts: Vec<usize> = (0..replications).step_by(CHUNK).collect();
    let partials: Vec<Vec<f64>> = starts
        .par_iter()
        .map(|&start| {
            let end = (start + CHUNK).min(replications);
            let mut acc = vec![Compensated::default(); width];
            let mut record = vec![0.0; width];
            for rep in start..end {
                record.iter_mut().for_each(|r| *r = 0.0);
                f(rep, &mut record);
                for (a, &v) in acc.iter_mut().zip(&record) {
                    a.add(v);
                }
            }
            acc.into_iter().map(Compensated::total).collect()
        })
        .collect();
    let mut grand = vec![Compensated::default(); width];
    for partial in &partials {
        for (a, &v) in grand.iter_mut().zip(partial) {
            a.add(v);
        }
    }
    grand.into_iter().map(Compensated::total).collect()
}

/// Everything about a design that replications share, precomputed once.
struct DesignContext {
    x: DenseMatrix<f64>,
    /// `(XᵀX)⁻¹Xᵀ`, mapping an error vector to the OLS coefficient error.
    projector: DenseMatrix<f64>,
    eig: SymEigResult<f64>,
    /// Correction coefficient for this design.
    coefficient: f64,
    /// A residual-free fit of the design, carrying the shared matrices
    /// for the closed-form moment formulas.
    theory_fit: OlsFit<f64>,
    summary: DesignSummary,
}

impl DesignContext {
    fn build(design: &DesignSpec) -> Result<Self> {
        let x = design.realize()?;
        let n = x.rows();
        let k = x.cols();
        // A zero response exercises the same validation and produces the
        // same design matrices as any real fit.
        let theory_fit = build_problem(x.clone(), vec![0.0; n])?.ols_fit()?;
        let projector = theory_fit.gram_inverse.matmul(&x.transpose())?;
        let eig = theory_fit.gram_inverse_eig.clone();
        let coefficient = correction_coefficient(n, k, eig.top_value())?;
        let column_correlation = if k == 2 {
            let c0 = x.column(0);
            let c1 = x.column(1);
            let m0 = c0.iter().sum::<f64>() / n as f64;
            let m1 = c1.iter().sum::<f64>() / n as f64;
            let mut num = 0.0;
            let mut d0 = 0.0;
            let mut d1 = 0.0;
            for i in 0..n {
                num += (c0[i] - m0) * (c1[i] - m1);
                d0 += (c0[i] - m0) * (c0[i] - m0);
                d1 += (c1[i] - m1) * (c1[i] - m1);
            }
            Some(num / (d0 * d1).sqrt())
        } else {
            None
        };
        let summary = DesignSummary {
            n,
            k,
            eigen_ratio: eig.eigenvalues[0] / eig.eigenvalues[k - 1],
            top_eigenvalue_share: eig.top_value() / eig.sum(),
            column_correlation,
        };
        Ok(DesignContext { x, projector, eig, coefficient, theory_fit, summary })
    }

    /// OLS coefficient error and residual sum of squares for one error
    /// draw. Identical (up to rounding) to fitting `Y = Xβ + ε`, since
    /// both the coefficient error and the residuals depend on ε alone.
    fn delta_sse(&self, eps: &[f64]) -> (Vec<f64>, f64) {
        let delta = self.projector.matvec(eps).expect("projector dims fixed");
        let fitted = self.x.matvec(&delta).expect("design dims fixed");
        let sse = eps.iter().zip(&fitted).map(|(e, f)| (e - f) * (e - f)).sum();
        (delta, sse)
    }
}

enum CompiledEstimator {
    Ols,
    QuasiOracle,
    OlsBox(Interval<f64>),
    QuasiBox(Interval<f64>),
}

fn compile_estimators(
    spec: &ExperimentSpec,
    k: usize,
) -> Result<Vec<CompiledEstimator>> {
    if spec.estimators.is_empty() {
        return Err(Error::InvalidParameter("no estimators requested".into()));
    }
    spec.estimators
        .iter()
        .map(|e| {
            Ok(match *e {
                EstimatorSpec::Ols => CompiledEstimator::Ols,
                EstimatorSpec::QuasiOracle => CompiledEstimator::QuasiOracle,
                EstimatorSpec::OlsBox { a1, a2 } | EstimatorSpec::QuasiBox { a1, a2 } => {
                    if k != 1 {
                        return Err(Error::InvalidRule(
                            "box estimators require a single-coefficient design".into(),
                        ));
                    }
                    let bounds = Interval::new(a1, a2)?;
                    if matches!(e, EstimatorSpec::OlsBox { .. }) {
                        CompiledEstimator::OlsBox(bounds)
                    } else {
                        CompiledEstimator::QuasiBox(bounds)
                    }
                }
            })
        })
        .collect()
}

fn validate_spec(spec: &ExperimentSpec, ctx: &DesignContext) -> Result<()> {
    if spec.replications == 0 {
        return Err(Error::InvalidParameter("need at least one replication".into()));
    }
    if spec.beta_true.len() != ctx.summary.k {
        return Err(Error::DimensionMismatch(format!(
            "beta_true has {} entries for a design with {} columns",
            spec.beta_true.len(),
            ctx.summary.k
        )));
    }
    spec.error_model.validate()
}

/// Squared distance to the truth of each compiled estimator for one
/// error draw.
fn squared_distances(
    ctx: &DesignContext,
    estimators: &[CompiledEstimator],
    beta: &[f64],
    eps: &[f64],
    out: &mut [f64],
) {
    let (delta, sse) = ctx.delta_sse(eps);
    let z1 = ctx.eig.eigenvectors.column(0);
    let t = dot(&z1, &delta);
    let correction = ctx.coefficient * sse.sqrt();
    let ols_sq = dot(&delta, &delta);
    for (slot, est) in out.iter_mut().zip(estimators) {
        *slot = match est {
            CompiledEstimator::Ols => ols_sq,
            // ‖δ − sign(z₁ᵀδ)·corr·z₁‖² expanded; sign(0) = +1 matches the
            // selector because the cross term vanishes at t = 0.
            CompiledEstimator::QuasiOracle => {
                ols_sq - 2.0 * correction * t.abs() + correction * correction
            }
            CompiledEstimator::OlsBox(bounds) => {
                let b = beta[0] + delta[0];
                let e = ols_box(b, bounds) - beta[0];
                e * e
            }
            CompiledEstimator::QuasiBox(bounds) => {
                let b = beta[0] + delta[0];
                let d = quasi_box(b, correction, bounds)
                    .expect("finite inputs by construction");
                let e = d.value - beta[0];
                e * e
            }
        };
    }
}

fn run_experiment(spec: &ExperimentSpec) -> Result<RiskReport> {
    let ctx = DesignContext::build(&spec.design)?;
    validate_spec(spec, &ctx)?;
    let estimators = compile_estimators(spec, ctx.summary.k)?;

    // Ratio pair: oracle/OLS when present, otherwise the box pair.
    let find = |target: fn(&EstimatorSpec) -> bool| {
        spec.estimators.iter().position(target)
    };
    let pair = match (
        find(|e| matches!(e, EstimatorSpec::QuasiOracle)),
        find(|e| matches!(e, EstimatorSpec::Ols)),
        find(|e| matches!(e, EstimatorSpec::QuasiBox { .. })),
        find(|e| matches!(e, EstimatorSpec::OlsBox { .. })),
    ) {
        (Some(nu), Some(de), _, _) => Some((nu, de, true)),
        (_, _, Some(nu), Some(de)) => Some((nu, de, false)),
        _ => None,
    };

    let ecount = estimators.len();
    // Record: squared distances, their squares (for SEs), and the ratio
    // pair's cross product (for the delta-method covariance).
    let width = 2 * ecount + 1;
    let n = ctx.summary.n;
    let reps = spec.replications;
    let sums = accumulate(reps, width, |rep, record| {
        let mut stream = RandomStream::substream(spec.seed, rep as u64);
        let eps = sample_errors(&spec.error_model, n, &mut stream)
            .expect("model validated");
        let (dist, rest) = record.split_at_mut(ecount);
        squared_distances(&ctx, &estimators, &spec.beta_true, &eps, dist);
        for i in 0..ecount {
            rest[i] = dist[i] * dist[i];
        }
        rest[ecount] = pair.map_or(0.0, |(nu, de, _)| dist[nu] * dist[de]);
    });

    let r = reps as f64;
    let variance = |mean: f64, sumsq: f64| -> f64 {
        if reps < 2 {
            return 0.0;
        }
        ((sumsq / r - mean * mean) * r / (r - 1.0)).max(0.0)
    };
    let risks: Vec<EstimatorRisk> = (0..ecount)
        .map(|i| {
            let mean = sums[i] / r;
            EstimatorRisk {
                estimator: spec.estimators[i].label().to_string(),
                risk: mean,
                standard_error: (variance(mean, sums[ecount + i]) / r).sqrt(),
            }
        })
        .collect();

    let ratio = match pair {
        Some((nu, de, oracle_pair)) if sums[de] > 0.0 => {
            let mn = sums[nu] / r;
            let md = sums[de] / r;
            let var_n = variance(mn, sums[ecount + nu]);
            let var_d = variance(md, sums[ecount + de]);
            let cov = if reps < 2 {
                0.0
            } else {
                (sums[2 * ecount] / r - mn * md) * r / (r - 1.0)
            };
            let observed = mn / md;
            let var_ratio = (var_n / (md * md)
                + mn * mn * var_d / (md * md * md * md)
                - 2.0 * mn * cov / (md * md * md))
                .max(0.0)
                / r;
            let (exact, asymptotic) = if oracle_pair {
                let theory = efficiency_ratio(&ctx.eig, n, ctx.summary.k)?;
                (Some(theory.exact), Some(theory.asymptotic))
            } else {
                (None, None)
            };
            Some(RatioSummary {
                numerator: spec.estimators[nu].label().to_string(),
                denominator: spec.estimators[de].label().to_string(),
                observed,
                standard_error: var_ratio.sqrt(),
                theoretical_exact: exact,
                theoretical_asymptotic: asymptotic,
            })
        }
        _ => None,
    };

    Ok(RiskReport {
        design: ctx.summary,
        replications: reps,
        seed: spec.seed,
        risks,
        ratio,
    })
}

/// Monte-Carlo risk comparison of plain and oracle-selected least
/// squares. Box estimators are rejected here; see [`run_box_experiment`].
pub fn run_risk_experiment(spec: &ExperimentSpec) -> Result<RiskReport> {
    if spec.estimators.iter().any(EstimatorSpec::is_box) {
        return Err(Error::InvalidRule(
            "box estimators belong to run_box_experiment".into(),
        ));
    }
    run_experiment(spec)
}

/// Monte-Carlo risk comparison involving the box rules (single
/// coefficient). Plain OLS or the oracle may be evaluated alongside.
pub fn run_box_experiment(spec: &ExperimentSpec) -> Result<RiskReport> {
    if !spec.estimators.iter().any(EstimatorSpec::is_box) {
        return Err(Error::InvalidRule(
            "box experiment needs at least one box estimator".into(),
        ));
    }
    run_experiment(spec)
}

/// Compares sample moments of the oracle-selected estimate with their
/// closed-form predictions. The `estimators` field of the spec is
/// ignored; the oracle estimator is what the predictions describe.
pub fn run_moment_checks(spec: &ExperimentSpec) -> Result<MomentChecks> {
    let ctx = DesignContext::build(&spec.design)?;
    validate_spec(spec, &ctx)?;
    let k = ctx.summary.k;
    let n = ctx.summary.n;
    let reps = spec.replications;
    if reps < 2 {
        return Err(Error::InvalidParameter("moment checks need several replications".into()));
    }

    // Slots: selected-error components (k), second-moment upper triangle
    // (k(k+1)/2), projection^2 and ^4 (2), fourth and eighth powers (2k).
    let tri = k * (k + 1) / 2;
    let width = k + tri + 2 + 2 * k;
    let sums = accumulate(reps, width, |rep, record| {
        let mut stream = RandomStream::substream(spec.seed, rep as u64);
        let eps = sample_errors(&spec.error_model, n, &mut stream)
            .expect("model validated");
        let (delta, sse) = ctx.delta_sse(&eps);
        let z1 = ctx.eig.eigenvectors.column(0);
        let t = dot(&z1, &delta);
        let correction = ctx.coefficient * sse.sqrt();
        let sign = if t >= 0.0 { 1.0 } else { -1.0 };
        let selected_err: Vec<f64> =
            (0..k).map(|j| delta[j] - sign * correction * z1[j]).collect();

        let mut pos = 0;
        for &e in &selected_err {
            record[pos] = e;
            pos += 1;
        }
        for i in 0..k {
            for j in i..k {
                record[pos] = selected_err[i] * selected_err[j];
                pos += 1;
            }
        }
        record[pos] = t * t;
        record[pos + 1] = t * t * t * t;
        pos += 2;
        for &e in &selected_err {
            let quad = e * e * e * e;
            record[pos] = quad;
            record[pos + k] = quad * quad;
            pos += 1;
        }
    });

    let r = reps as f64;
    let means: Vec<f64> = (0..k).map(|j| sums[j] / r).collect();
    // Sample covariance about the sample mean.
    let mut cov = DenseMatrix::zeros(k, k);
    {
        let mut pos = k;
        for i in 0..k {
            for j in i..k {
                let c = (sums[pos] / r - means[i] * means[j]) * r / (r - 1.0);
                cov.set(i, j, c);
                cov.set(j, i, c);
                pos += 1;
            }
        }
    }

    let sigma = spec.error_model.marginal_variance().sqrt();
    let theory_cov = quasi_covariance(&ctx.theory_fit, sigma)?.q;
    let mut gap_sq = 0.0;
    let mut ref_sq = 0.0;
    for i in 0..k {
        for j in 0..k {
            let d = cov.get(i, j) - theory_cov.get(i, j);
            gap_sq += d * d;
            ref_sq += theory_cov.get(i, j) * theory_cov.get(i, j);
        }
    }

    let max_mean_z = (0..k)
        .map(|j| means[j].abs() / (cov.get(j, j) / r).sqrt())
        .fold(0.0, f64::max);
    let mean_estimates: Vec<f64> =
        means.iter().zip(&spec.beta_true).map(|(m, b)| m + b).collect();

    let proj_pos = k + tri;
    let proj_var = sums[proj_pos] / r;
    let proj_var_of_sq =
        ((sums[proj_pos + 1] / r - proj_var * proj_var) * r / (r - 1.0)).max(0.0);
    let proj_theory = ctx.eig.top_value() * sigma * sigma;
    let projection_variance_z =
        (proj_var - proj_theory).abs() / (proj_var_of_sq / r).sqrt();

    let mut fourth_moments = Vec::with_capacity(k);
    let mut fourth_theory = Vec::with_capacity(k);
    let mut fourth_moment_max_z = 0.0f64;
    for j in 0..k {
        let m4 = sums[proj_pos + 2 + j] / r;
        let m8 = sums[proj_pos + 2 + k + j] / r;
        let var4 = ((m8 - m4 * m4) * r / (r - 1.0)).max(0.0);
        let theory = fourth_moment(&ctx.theory_fit, sigma, j)?.mu4;
        fourth_moment_max_z =
            fourth_moment_max_z.max((m4 - theory).abs() / (var4 / r).sqrt());
        fourth_moments.push(m4);
        fourth_theory.push(theory);
    }

    Ok(MomentChecks {
        replications: reps,
        mean_estimates,
        max_mean_z,
        covariance_rel_frobenius: (gap_sq / ref_sq).sqrt(),
        projection_variance: proj_var,
        projection_variance_theory: proj_theory,
        projection_variance_z,
        fourth_moments,
        fourth_moments_theory: fourth_theory,
        fourth_moment_max_z,
    })
}
