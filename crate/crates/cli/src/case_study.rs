//! The `case-study` command: rerun the two bundled studies and compare
//! every headline number against its expected value.

use clap::Args;
use serde::{Deserialize, Serialize};

use quasireg_core::datasets;
use quasireg_core::regression::sigma_from_probable_error;
use quasireg_core::selection::{choose_by_range, choose_by_signs, Interval, SignConstraint};
use quasireg_core::{quasi, Matrix};

use crate::failure::Failure;
use crate::fit::{assemble_report, problem_from_arrays, selection_from_decision};
use crate::report::{g6, sha256_hex, Provenance, Report, SCHEMA_VERSION};

/// Bundled copy of the light-deflection measurements, shipped with the
/// binary so the study needs no external files.
pub const ECLIPSE_CSV: &str = include_str!("../data/eclipse.csv");
/// Bundled copy of the glucose/insulin regression data (the response was
/// synthesized from known coefficients; the noise column is not shipped
/// because a fit never sees it).
pub const DIABETES_CSV: &str = include_str!("../data/diabetes.csv");

/// Expected values: light-deflection study with the third probable error
/// taken as 0.6 (high alternative, low alternative, selected estimate,
/// weighted mean, correction length).
pub const ECLIPSE_EXPECTED: EclipseExpected = EclipseExpected {
    high: 2.0051,
    low: 1.7862,
    chosen: 1.7862,
    weighted_mean: Some(1.8957),
    correction: Some(0.1094),
};

/// Expected values for the variant run with the third probable error 0.4.
pub const ECLIPSE_VARIANT_EXPECTED: EclipseExpected = EclipseExpected {
    high: 2.0,
    low: 1.7141,
    chosen: 1.7141,
    weighted_mean: None,
    correction: None,
};

pub const DIABETES_EXPECTED_OLS: [f64; 2] = [-0.2868, 7.9614];
/// The alternative admissible under signs (+, -).
pub const DIABETES_EXPECTED_CHOSEN: [f64; 2] = [21.473, -15.329];
pub const DIABETES_EXPECTED_OTHER: [f64; 2] = [-22.047, 31.252];
pub const DIABETES_EXPECTED_DISTANCE_OLS: f64 = 3644.6;
pub const DIABETES_EXPECTED_DISTANCE_CHOSEN: f64 = 812.9;

/// Default tolerance when comparing reproduced values.
pub const VALUE_TOLERANCE: f64 = 5e-3;
/// Tolerance for the squared-distance comparisons (the values are four
/// orders of magnitude larger).
pub const DISTANCE_TOLERANCE: f64 = 0.5;

/// Admissible range for the light-deflection coefficient: the larger
/// alternative exceeded every value allowed a priori, so selection keeps
/// the one below the largest predicted deflection.
pub const ECLIPSE_ADMISSIBLE: (f64, f64) = (0.0, 1.9);

#[derive(Debug, Clone, Copy)]
pub struct EclipseExpected {
    pub high: f64,
    pub low: f64,
    pub chosen: f64,
    pub weighted_mean: Option<f64>,
    pub correction: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CaseStudyArgs {
    /// Which study to run: eclipse, eclipse-pe04, or diabetes.
    pub name: String,

    /// Output format.
    #[arg(long, value_enum, default_value_t = crate::OutputFormat::Table)]
    pub output: crate::OutputFormat,
}

/// One reproduced number compared against its expected value.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub label: String,
    pub computed: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub difference: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(label: impl Into<String>, computed: f64, expected: f64, tolerance: f64) -> Self {
        let difference = (computed - expected).abs();
        Check {
            label: label.into(),
            computed,
            expected,
            tolerance,
            difference,
            pass: difference <= tolerance,
        }
    }
}

/// Full outcome of a case study: the fit report plus the comparisons.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CaseStudyOutcome {
    pub schema_version: u32,
    pub name: String,
    pub report: Report,
    pub checks: Vec<Check>,
    pub pass: bool,
}

/// Numbers produced by the light-deflection pipeline.
#[derive(Debug, Clone, Copy)]
pub struct EclipseComputed {
    pub weighted_mean: f64,
    pub correction: f64,
    pub high: f64,
    pub low: f64,
    pub chosen: f64,
}

/// Run the light-deflection study: whiten three direct measurements by
/// their probable errors, fit the common mean, derive the alternatives,
/// and select by the admissible range.
pub fn eclipse_computed(variant: bool) -> Result<(EclipseComputed, Report), Failure> {
    let values = datasets::eclipse_values();
    let probable_errors = if variant {
        datasets::eclipse_probable_errors_variant()
    } else {
        datasets::eclipse_probable_errors()
    };
    let x = Matrix::column_of_ones(values.len());
    let problem = problem_from_arrays(x, values)?;
    let g = probable_errors
        .iter()
        .map(|&pe| sigma_from_probable_error(pe).map(|s| s * s))
        .collect::<Result<Vec<f64>, _>>()
        .map_err(Failure::parse_from_core)?;
    let problem = problem.whiten_diagonal(&g).map_err(Failure::from_core)?;
    let fit = problem.ols_fit().map_err(Failure::from_core)?;

    let alts = quasi::alternatives(&fit).map_err(Failure::from_core)?;
    let (lo, hi) = ECLIPSE_ADMISSIBLE;
    let admissible = Interval::new(lo, hi).map_err(Failure::rule_from_core)?;
    let decision = choose_by_range(&alts, &[admissible]).map_err(Failure::rule_from_core)?;
    let chosen = decision
        .chosen
        .as_ref()
        .ok_or_else(|| Failure::other("range selection was ambiguous"))?[0];

    let computed = EclipseComputed {
        weighted_mean: fit.b[0],
        correction: alts.correction,
        high: alts.b_plus[0].max(alts.b_minus[0]),
        low: alts.b_plus[0].min(alts.b_minus[0]),
        chosen,
    };
    let report = assemble_report(
        &fit,
        &["deflection".to_string()],
        None,
        Some(selection_from_decision(format!("range {lo}:{hi}"), &decision)),
        0.05,
        Provenance {
            version: env!("CARGO_PKG_VERSION").to_string(),
            input_sha256: sha256_hex(ECLIPSE_CSV.as_bytes()),
            seed: 0,
        },
    )?;
    Ok((computed, report))
}

/// Numbers produced by the glucose/insulin pipeline.
#[derive(Debug, Clone)]
pub struct DiabetesComputed {
    pub ols: [f64; 2],
    pub chosen: [f64; 2],
    pub other: [f64; 2],
    pub distance_ols: f64,
    pub distance_chosen: f64,
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum()
}

/// Run the glucose/insulin study: fit the collinear two-regressor model,
/// derive the alternatives, select by signs (+, -), and measure squared
/// distances to the known true coefficients.
pub fn diabetes_computed() -> Result<(DiabetesComputed, Report), Failure> {
    let problem = problem_from_arrays(datasets::diabetes_design(), datasets::diabetes_response())?;
    let fit = problem.ols_fit().map_err(Failure::from_core)?;
    let alts = quasi::alternatives(&fit).map_err(Failure::from_core)?;
    let constraints = [SignConstraint::Positive, SignConstraint::Negative];
    let decision = choose_by_signs(&alts, &constraints).map_err(Failure::rule_from_core)?;
    let chosen_vec = decision
        .chosen
        .clone()
        .ok_or_else(|| Failure::other("sign selection was ambiguous"))?;
    let other_vec = if chosen_vec == alts.b_plus { &alts.b_minus } else { &alts.b_plus };

    let beta = datasets::diabetes_beta_true();
    let computed = DiabetesComputed {
        ols: [fit.b[0], fit.b[1]],
        chosen: [chosen_vec[0], chosen_vec[1]],
        other: [other_vec[0], other_vec[1]],
        distance_ols: squared_distance(&fit.b, &beta),
        distance_chosen: squared_distance(&chosen_vec, &beta),
    };
    let report = assemble_report(
        &fit,
        &["X1".to_string(), "X2".to_string()],
        None,
        Some(selection_from_decision("signs +,-".to_string(), &decision)),
        0.05,
        Provenance {
            version: env!("CARGO_PKG_VERSION").to_string(),
            input_sha256: sha256_hex(DIABETES_CSV.as_bytes()),
            seed: 0,
        },
    )?;
    Ok((computed, report))
}

fn eclipse_checks(computed: &EclipseComputed, expected: &EclipseExpected) -> Vec<Check> {
    let mut checks = vec![
        Check::new("alternative high", computed.high, expected.high, VALUE_TOLERANCE),
        Check::new("alternative low", computed.low, expected.low, VALUE_TOLERANCE),
        Check::new("chosen", computed.chosen, expected.chosen, VALUE_TOLERANCE),
    ];
    if let Some(mean) = expected.weighted_mean {
        checks.push(Check::new("weighted mean", computed.weighted_mean, mean, VALUE_TOLERANCE));
    }
    if let Some(correction) = expected.correction {
        checks.push(Check::new("correction", computed.correction, correction, VALUE_TOLERANCE));
    }
    checks
}

fn diabetes_checks(computed: &DiabetesComputed) -> Vec<Check> {
    vec![
        Check::new("ols[X1]", computed.ols[0], DIABETES_EXPECTED_OLS[0], VALUE_TOLERANCE),
        Check::new("ols[X2]", computed.ols[1], DIABETES_EXPECTED_OLS[1], VALUE_TOLERANCE),
        Check::new(
            "chosen[X1]",
            computed.chosen[0],
            DIABETES_EXPECTED_CHOSEN[0],
            VALUE_TOLERANCE,
        ),
        Check::new(
            "chosen[X2]",
            computed.chosen[1],
            DIABETES_EXPECTED_CHOSEN[1],
            VALUE_TOLERANCE,
        ),
        Check::new(
            "other alternative[X1]",
            computed.other[0],
            DIABETES_EXPECTED_OTHER[0],
            VALUE_TOLERANCE,
        ),
        Check::new(
            "other alternative[X2]",
            computed.other[1],
            DIABETES_EXPECTED_OTHER[1],
            VALUE_TOLERANCE,
        ),
        Check::new(
            "squared distance, least squares",
            computed.distance_ols,
            DIABETES_EXPECTED_DISTANCE_OLS,
            DISTANCE_TOLERANCE,
        ),
        Check::new(
            "squared distance, chosen",
            computed.distance_chosen,
            DIABETES_EXPECTED_DISTANCE_CHOSEN,
            DISTANCE_TOLERANCE,
        ),
    ]
}

/// Compute a named case study's outcome (report plus comparisons).
pub fn run_case_study(name: &str) -> Result<CaseStudyOutcome, Failure> {
    let (report, checks) = match name {
        "eclipse" => {
            let (computed, report) = eclipse_computed(false)?;
            (report, eclipse_checks(&computed, &ECLIPSE_EXPECTED))
        }
        "eclipse-pe04" => {
            let (computed, report) = eclipse_computed(true)?;
            (report, eclipse_checks(&computed, &ECLIPSE_VARIANT_EXPECTED))
        }
        "diabetes" => {
            let (computed, report) = diabetes_computed()?;
            (report, diabetes_checks(&computed))
        }
        other => {
            return Err(Failure::parse(format!(
                "unknown case study {other:?}; available: eclipse, eclipse-pe04, diabetes"
            )))
        }
    };
    let pass = checks.iter().all(|c| c.pass);
    Ok(CaseStudyOutcome {
        schema_version: SCHEMA_VERSION,
        name: name.to_string(),
        report,
        checks,
        pass,
    })
}

pub fn cmd_case_study(args: &CaseStudyArgs) -> Result<(), Failure> {
    let outcome = run_case_study(&args.name)?;
    match args.output {
        crate::OutputFormat::Json => println!(
            "{}",
            serde_json::to_string_pretty(&outcome)
                .map_err(|e| Failure::other(format!("serialize outcome: {e}")))?
        ),
        crate::OutputFormat::Table => {
            println!("case study {}", outcome.name);
            println!(
                "  {:<32}  {:>12}  {:>12}  {:>10}  result",
                "check", "computed", "expected", "|diff|"
            );
            for check in &outcome.checks {
                println!(
                    "  {:<32}  {:>12}  {:>12}  {:>10}  {}",
                    check.label,
                    g6(check.computed),
                    g6(check.expected),
                    g6(check.difference),
                    if check.pass { "PASS" } else { "FAIL" }
                );
            }
            println!(
                "case study {}: {}",
                outcome.name,
                if outcome.pass { "PASS" } else { "FAIL" }
            );
        }
    }
    if outcome.pass {
        Ok(())
    } else {
        Err(Failure::other(format!(
            "case study {} is outside tolerance",
            outcome.name
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn csv_column(text: &str, name: &str) -> Vec<f64> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(text.as_bytes());
        let index = reader
            .headers()
            .unwrap()
            .iter()
            .position(|h| h == name)
            .unwrap_or_else(|| panic!("column {name} missing"));
        reader
            .records()
            .map(|r| r.unwrap()[index].parse().unwrap())
            .collect()
    }

    #[test]
    fn bundled_eclipse_csv_matches_the_library_data() {
        assert_eq!(csv_column(ECLIPSE_CSV, "value"), datasets::eclipse_values());
        assert_eq!(
            csv_column(ECLIPSE_CSV, "probable_error"),
            datasets::eclipse_probable_errors()
        );
    }

    #[test]
    fn bundled_diabetes_csv_matches_the_library_data() {
        let design = datasets::diabetes_design();
        let x1: Vec<f64> = (0..design.rows()).map(|r| design.get(r, 0)).collect();
        let x2: Vec<f64> = (0..design.rows()).map(|r| design.get(r, 1)).collect();
        assert_eq!(csv_column(DIABETES_CSV, "X1"), x1);
        assert_eq!(csv_column(DIABETES_CSV, "X2"), x2);
        assert_eq!(csv_column(DIABETES_CSV, "Y"), datasets::diabetes_response());
    }

    #[test]
    fn unknown_name_is_a_parse_failure() {
        let err = run_case_study("nope").unwrap_err();
        assert_eq!(err.code, crate::failure::EXIT_PARSE);
    }
}
