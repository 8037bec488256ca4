//! The `fit` command: CSV ingestion, preprocessing, the two-stage
//! estimator, optional constrained selection, and interval inference.

use clap::Args;
use std::path::PathBuf;

use quasireg_core::regression::sigma_from_probable_error;
use quasireg_core::selection::{
    choose_by_box, choose_by_range, choose_by_signs, Decision, DecisionSource, Interval,
    SignConstraint,
};
use quasireg_core::{quasi, Error as CoreError, Fit, Matrix, Problem};

use crate::failure::Failure;
use crate::report::{
    sha256_hex, InferenceBlock, IntervalBlock, JointRegionBlock, OlsBlock, Provenance, QuasiBlock,
    Report, SelectionBlock, SCHEMA_VERSION,
};

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Input CSV file (comma-separated, first row holds column names).
    #[arg(long)]
    pub data: PathBuf,

    /// Name of the response column.
    #[arg(long)]
    pub response: String,

    /// Comma-separated regressor column names, in coefficient order.
    #[arg(long, value_delimiter = ',')]
    pub regressors: Vec<String>,

    /// Remove column means from regressors and response before fitting;
    /// the intercept is recovered and reported separately.
    #[arg(long, conflicts_with = "intercept")]
    pub center: bool,

    /// Append a column of ones to the design (an explicit intercept
    /// coefficient; equivalent to centering for the remaining ones).
    #[arg(long)]
    pub intercept: bool,

    /// Column of observation weights w (error variance taken as 1/w).
    #[arg(long, conflicts_with = "probable_error")]
    pub weights: Option<String>,

    /// Column of probable errors; each converts to a standard deviation
    /// via pe/0.6745 and the rows are whitened accordingly.
    #[arg(long)]
    pub probable_error: Option<String>,

    /// Sign constraints, one per coefficient: `+`, `-`, or `.` (free),
    /// e.g. `--signs +,-`.
    #[arg(long, group = "rule")]
    pub signs: Option<String>,

    /// Admissible intervals, one per coefficient, `lower:upper` separated
    /// by commas; `inf`/`-inf` allowed, e.g. `--range 0:1.9`.
    #[arg(long, group = "rule")]
    pub range: Option<String>,

    /// Box bounds `a1,a2` for a single-coefficient fit; applies the
    /// staged box rule instead of plain clamping.
    #[arg(long = "box", group = "rule")]
    pub box_bounds: Option<String>,

    /// Significance level for the intervals and the joint region.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,

    /// Output format.
    #[arg(long, value_enum, default_value_t = crate::OutputFormat::Table)]
    pub output: crate::OutputFormat,

    /// Recorded in the report provenance; fitting itself is deterministic.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// A parsed CSV: header names plus all referenced columns as numbers.
struct CsvTable {
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    fn load(path: &PathBuf) -> Result<Self, Failure> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| Failure::parse(format!("cannot read {}: {e}", path.display())))?;
        let headers = reader
            .headers()
            .map_err(|e| Failure::parse(format!("bad CSV header: {e}")))?
            .iter()
            .map(str::to_string)
            .collect();
        let mut rows = Vec::new();
        for (index, record) in reader.records().enumerate() {
            let record =
                record.map_err(|e| Failure::parse(format!("bad CSV row {}: {e}", index + 2)))?;
            rows.push(record.iter().map(str::to_string).collect());
        }
        if rows.is_empty() {
            return Err(Failure::parse("CSV contains no data rows"));
        }
        Ok(CsvTable { headers, rows })
    }

    /// Index of a referenced column; the name must resolve uniquely.
    fn column_index(&self, name: &str) -> Result<usize, Failure> {
        let matches: Vec<usize> = self
            .headers
            .iter()
            .enumerate()
            .filter(|(_, h)| h.as_str() == name)
            .map(|(i, _)| i)
            .collect();
        match matches.as_slice() {
            [index] => Ok(*index),
            [] => Err(Failure::parse(format!(
                "column {name:?} not found; available: {}",
                self.headers.join(", ")
            ))),
            _ => Err(Failure::parse(format!("column name {name:?} is ambiguous"))),
        }
    }

    fn numeric_column(&self, name: &str) -> Result<Vec<f64>, Failure> {
        let column = self.column_index(name)?;
        self.rows
            .iter()
            .enumerate()
            .map(|(row, cells)| {
                let cell = cells.get(column).ok_or_else(|| {
                    Failure::parse(format!("row {} is missing column {name:?}", row + 2))
                })?;
                cell.parse::<f64>().map_err(|_| {
                    Failure::parse(format!(
                        "cell {cell:?} in column {name:?}, row {} is not a number",
                        row + 2
                    ))
                })
            })
            .collect()
    }
}

/// Map errors from problem construction: insufficient rows or a rank
/// deficient design are model errors, anything else indicts the input.
fn build_failure(err: CoreError) -> Failure {
    match &err {
        CoreError::RankDeficient(_) | CoreError::InsufficientDof { .. } => Failure::from_core(err),
        _ => Failure::parse_from_core(err),
    }
}

pub fn cmd_fit(args: &FitArgs) -> Result<(), Failure> {
    let raw_bytes = std::fs::read(&args.data)
        .map_err(|e| Failure::parse(format!("cannot read {}: {e}", args.data.display())))?;
    let table = CsvTable::load(&args.data)?;

    let mut names: Vec<String> = args.regressors.clone();
    let mut columns: Vec<Vec<f64>> = names
        .iter()
        .map(|name| table.numeric_column(name))
        .collect::<Result<_, _>>()?;
    let y = table.numeric_column(&args.response)?;
    if args.intercept {
        names.push("intercept".to_string());
        columns.push(vec![1.0; y.len()]);
    }
    if columns.is_empty() {
        return Err(Failure::parse(
            "no regressors: pass --regressors and/or --intercept",
        ));
    }

    let n = y.len();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|r| columns.iter().map(|c| c[r]).collect())
        .collect();
    let x = Matrix::from_rows(&rows).map_err(build_failure)?;
    let problem = quasireg_core::regression::build_problem(x, y).map_err(build_failure)?;

    let problem = if args.center {
        problem.center().map_err(build_failure)?
    } else {
        problem
    };
    // Keep the pre-whitening problem: centering bookkeeping lives there.
    let centered = problem.clone();

    let problem = if let Some(weights_column) = &args.weights {
        let w = table.numeric_column(weights_column)?;
        if !w.iter().all(|&v| v.is_finite() && v > 0.0) {
            return Err(Failure::parse("weights must be positive"));
        }
        let g: Vec<f64> = w.iter().map(|&v| 1.0 / v).collect();
        problem.whiten_diagonal(&g).map_err(build_failure)?
    } else if let Some(pe_column) = &args.probable_error {
        let pe = table.numeric_column(pe_column)?;
        let g = pe
            .iter()
            .map(|&p| sigma_from_probable_error(p).map(|s| s * s))
            .collect::<Result<Vec<f64>, _>>()
            .map_err(Failure::parse_from_core)?;
        problem.whiten_diagonal(&g).map_err(build_failure)?
    } else {
        problem
    };

    let fit = problem.ols_fit().map_err(Failure::from_core)?;
    let intercept = centered.recover_intercept(&fit.b);

    let selection = selection_block(args, &fit)?;
    let report = assemble_report(
        &fit,
        &names,
        intercept,
        selection,
        args.alpha,
        Provenance {
            version: env!("CARGO_PKG_VERSION").to_string(),
            input_sha256: sha256_hex(&raw_bytes),
            seed: args.seed,
        },
    )?;

    match args.output {
        crate::OutputFormat::Json => println!("{}", report.to_json()),
        crate::OutputFormat::Table => print!("{}", report.to_table()),
    }
    Ok(())
}

fn selection_block(args: &FitArgs, fit: &Fit) -> Result<Option<SelectionBlock>, Failure> {
    let alts = quasi::alternatives(fit).map_err(Failure::from_core)?;
    let (rule, decision) = if let Some(signs) = &args.signs {
        let constraints: Vec<SignConstraint> = signs
            .split(',')
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(Failure::rule_from_core)?;
        let decision = choose_by_signs(&alts, &constraints).map_err(rule_failure)?;
        (format!("signs {signs}"), decision)
    } else if let Some(range) = &args.range {
        let ranges: Vec<Interval<f64>> = range
            .split(',')
            .map(parse_interval)
            .collect::<Result<_, _>>()?;
        let decision = choose_by_range(&alts, &ranges).map_err(rule_failure)?;
        (format!("range {range}"), decision)
    } else if let Some(bounds) = &args.box_bounds {
        let (a1, a2) = bounds
            .split_once(',')
            .ok_or_else(|| Failure::rule(format!("box bounds {bounds:?} are not `a1,a2`")))?;
        let interval = parse_interval(&format!("{a1}:{a2}"))?;
        let decision = choose_by_box(&alts, &interval).map_err(rule_failure)?;
        (format!("box {bounds}"), decision)
    } else {
        return Ok(None);
    };
    Ok(Some(selection_from_decision(rule, &decision)))
}

/// Arity mismatches between a rule and the fit are rule errors here,
/// whatever the core calls them.
fn rule_failure(err: CoreError) -> Failure {
    Failure::rule(err.to_string())
}

pub fn selection_from_decision(rule: String, decision: &Decision<f64>) -> SelectionBlock {
    SelectionBlock {
        rule,
        chosen: decision.chosen.clone(),
        source: decision.source.map(source_name).map(str::to_string),
        ambiguous: decision.is_ambiguous(),
        rationale: decision.rationale.clone(),
    }
}

pub fn source_name(source: DecisionSource) -> &'static str {
    match source {
        DecisionSource::AltPlus => "alt_plus",
        DecisionSource::AltMinus => "alt_minus",
        DecisionSource::Ols => "ols",
        DecisionSource::ClampLow => "clamp_low",
        DecisionSource::ClampHigh => "clamp_high",
    }
}

fn parse_interval(token: &str) -> Result<Interval<f64>, Failure> {
    let (lo, hi) = token
        .split_once(':')
        .ok_or_else(|| Failure::rule(format!("interval {token:?} is not `lower:upper`")))?;
    let lower: f64 = lo
        .trim()
        .parse()
        .map_err(|_| Failure::rule(format!("interval bound {lo:?} is not a number")))?;
    let upper: f64 = hi
        .trim()
        .parse()
        .map_err(|_| Failure::rule(format!("interval bound {hi:?} is not a number")))?;
    Interval::new(lower, upper).map_err(Failure::rule_from_core)
}

/// Build the full report from a fit: the least-squares block, the
/// alternative-estimates block, an optional selection outcome, and
/// interval/joint inference centered on the preferred estimate.
pub fn assemble_report(
    fit: &Fit,
    names: &[String],
    intercept: Option<f64>,
    selection: Option<SelectionBlock>,
    alpha: f64,
    provenance: Provenance,
) -> Result<Report, Failure> {
    let alts = quasi::alternatives(fit).map_err(Failure::from_core)?;
    let efficiency =
        quasi::efficiency_ratio(&fit.gram_inverse_eig, fit.n, fit.k).map_err(Failure::from_core)?;

    let center: Vec<f64> = selection
        .as_ref()
        .and_then(|s| s.chosen.clone())
        .unwrap_or_else(|| fit.b.clone());

    let mut intervals = Vec::with_capacity(fit.k);
    for component in 0..fit.k {
        let ci = quasi::confidence_interval(&center, fit, component, alpha)
            .map_err(Failure::parse_from_core)?;
        intervals.push(IntervalBlock {
            name: names[component].clone(),
            lower: ci.lower(),
            upper: ci.upper(),
        });
    }
    let joint = quasi::joint_region(&center, fit, alpha).map_err(Failure::parse_from_core)?;
    let shape: Vec<Vec<f64>> = (0..fit.k)
        .map(|r| (0..fit.k).map(|c| joint.shape.get(r, c)).collect())
        .collect();

    Ok(Report {
        schema_version: SCHEMA_VERSION,
        provenance,
        ols: OlsBlock {
            names: names.to_vec(),
            coefficients: fit.b.clone(),
            intercept,
            s: fit.s,
            sse: fit.sse,
            n: fit.n,
            k: fit.k,
            dof: fit.dof(),
            eigenvalues: fit.gram_inverse_eig.eigenvalues.clone(),
        },
        quasi: QuasiBlock {
            coefficient: alts.coefficient,
            top_eigenvalue: alts.top_eigenvalue,
            direction: alts.direction.clone(),
            correction: alts.correction,
            b_plus: alts.b_plus.clone(),
            b_minus: alts.b_minus.clone(),
            near_degenerate: alts.near_degenerate,
            efficiency_exact: efficiency.exact,
            efficiency_asymptotic: efficiency.asymptotic,
        },
        selection,
        inference: InferenceBlock {
            alpha,
            center,
            intervals,
            joint_region: JointRegionBlock { shape, radius: joint.radius },
        },
    })
}

/// Build a ready-to-fit problem from bundled arrays (used by the case
/// studies, which skip CSV ingestion).
pub fn problem_from_arrays(x: Matrix, y: Vec<f64>) -> Result<Problem, Failure> {
    quasireg_core::regression::build_problem(x, y).map_err(build_failure)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_parser_accepts_infinities() {
        let i = parse_interval("-inf:1.9").unwrap();
        assert_eq!(i.lower, f64::NEG_INFINITY);
        assert_eq!(i.upper, 1.9);
        assert!(parse_interval("0:nan").is_err());
        assert!(parse_interval("1.9").is_err());
        assert!(parse_interval("2:1").is_err());
    }

    #[test]
    fn build_failure_classifies_model_errors() {
        let err = CoreError::InsufficientDof { n: 3, k: 3 };
        assert_eq!(build_failure(err).code, crate::failure::EXIT_MODEL);
        let err = CoreError::NonFinite("x");
        assert_eq!(build_failure(err).code, crate::failure::EXIT_PARSE);
    }
}
