//! Machine-readable and human-readable fit reports.
//!
//! The JSON schema is stable: field names and order are fixed by the
//! struct declarations below, floats serialize with full round-trip
//! precision, and re-parsing a report then re-rendering it yields an
//! identical document. The table renderer shows every number with six
//! significant digits.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

/// Everything needed to reproduce the run that produced a report.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Provenance {
    /// Version of the tool that wrote the report.
    pub version: String,
    /// SHA-256 of the input the command consumed (CSV bytes for fits,
    /// resolved configuration for simulations, bundled data for case
    /// studies), as lowercase hex.
    pub input_sha256: String,
    /// Root seed. Fitting is deterministic, so fits carry the seed flag
    /// value verbatim; simulations derive every replication from it.
    pub seed: u64,
}

/// The ordinary-least-squares stage.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct OlsBlock {
    /// Column names, in coefficient order.
    pub names: Vec<String>,
    pub coefficients: Vec<f64>,
    /// Recovered intercept when the problem was mean-centered.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intercept: Option<f64>,
    pub s: f64,
    pub sse: f64,
    pub n: usize,
    pub k: usize,
    pub dof: usize,
    /// Eigenvalues of the inverse Gram matrix, descending.
    pub eigenvalues: Vec<f64>,
}

/// The correction stage: the two alternative estimates and the risk
/// improvement they promise.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct QuasiBlock {
    /// Optimal correction constant for this design.
    pub coefficient: f64,
    pub top_eigenvalue: f64,
    /// Unit eigenvector the correction moves along.
    pub direction: Vec<f64>,
    /// Residual-scaled correction length actually applied.
    pub correction: f64,
    pub b_plus: Vec<f64>,
    pub b_minus: Vec<f64>,
    /// Set when the top eigenvalue is nearly tied and the direction is
    /// numerically arbitrary.
    pub near_degenerate: bool,
    /// Predicted risk ratio (selected vs. plain least squares).
    pub efficiency_exact: f64,
    pub efficiency_asymptotic: f64,
}

/// Outcome of an explicit selection rule, when one was requested.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SelectionBlock {
    /// The rule as given on the command line, e.g. `signs +,-`.
    pub rule: String,
    pub chosen: Option<Vec<f64>>,
    pub source: Option<String>,
    pub ambiguous: bool,
    pub rationale: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct IntervalBlock {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct JointRegionBlock {
    /// Shape matrix of the quadratic form, row by row.
    pub shape: Vec<Vec<f64>>,
    /// Right-hand side of the quadratic inequality.
    pub radius: f64,
}

/// Interval and joint-region inference around the reported estimate.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct InferenceBlock {
    pub alpha: f64,
    /// The estimate the intervals are centered on: the selected one when
    /// a rule chose unambiguously, otherwise plain least squares.
    pub center: Vec<f64>,
    pub intervals: Vec<IntervalBlock>,
    pub joint_region: JointRegionBlock,
}

/// Full fit report: one JSON document per run.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Report {
    pub schema_version: u32,
    pub provenance: Provenance,
    pub ols: OlsBlock,
    pub quasi: QuasiBlock,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub selection: Option<SelectionBlock>,
    pub inference: InferenceBlock,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for byte in digest {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

/// Render a float with six significant digits, plain notation for
/// moderate magnitudes and scientific notation otherwise, trailing
/// zeros trimmed.
pub fn g6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exponent = x.abs().log10().floor() as i32;
    if (-4..=5).contains(&exponent) {
        let decimals = (5 - exponent).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let formatted = format!("{x:.5e}");
        match formatted.split_once('e') {
            Some((mantissa, exp)) => format!("{}e{exp}", trim_zeros(mantissa.to_string())),
            None => formatted,
        }
    }
}

fn trim_zeros(mut s: String) -> String {
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

fn vec_g6(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|&x| g6(x)).collect();
    format!("[{}]", parts.join(", "))
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Human-readable rendering: six significant digits everywhere.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let p = &self.provenance;
        out.push_str(&format!(
            "fit report (schema {})\n  input sha256: {}\n  seed: {}  version: {}\n\n",
            self.schema_version, p.input_sha256, p.seed, p.version
        ));

        let o = &self.ols;
        out.push_str("least squares\n");
        let width = o.names.iter().map(|n| n.len()).max().unwrap_or(4).max(4);
        for (name, value) in o.names.iter().zip(&o.coefficients) {
            out.push_str(&format!("  {name:<width$}  {}\n", g6(*value)));
        }
        if let Some(intercept) = o.intercept {
            out.push_str(&format!("  intercept (from centering): {}\n", g6(intercept)));
        }
        out.push_str(&format!(
            "  s = {}  sse = {}  n = {}  k = {}  dof = {}\n",
            g6(o.s),
            g6(o.sse),
            o.n,
            o.k,
            o.dof
        ));
        out.push_str(&format!(
            "  eigenvalues of inverse Gram: {}\n\n",
            vec_g6(&o.eigenvalues)
        ));

        let q = &self.quasi;
        out.push_str("alternative estimates\n");
        out.push_str(&format!(
            "  coefficient = {}  top eigenvalue = {}  correction = {}\n",
            g6(q.coefficient),
            g6(q.top_eigenvalue),
            g6(q.correction)
        ));
        out.push_str(&format!("  direction: {}\n", vec_g6(&q.direction)));
        out.push_str(&format!("  b_plus:  {}\n", vec_g6(&q.b_plus)));
        out.push_str(&format!("  b_minus: {}\n", vec_g6(&q.b_minus)));
        if q.near_degenerate {
            out.push_str("  warning: the top eigenvalue is nearly tied; the direction is unstable\n");
        }
        out.push_str(&format!(
            "  efficiency vs least squares: exact {}  asymptotic {}\n\n",
            g6(q.efficiency_exact),
            g6(q.efficiency_asymptotic)
        ));

        if let Some(sel) = &self.selection {
            out.push_str(&format!("selection ({})\n", sel.rule));
            match &sel.chosen {
                Some(chosen) => out.push_str(&format!("  chosen: {}\n", vec_g6(chosen))),
                None => out.push_str("  chosen: none (ambiguous)\n"),
            }
            if let Some(source) = &sel.source {
                out.push_str(&format!("  source: {source}\n"));
            }
            out.push_str(&format!("  rationale: {}\n\n", sel.rationale));
        }

        let inf = &self.inference;
        out.push_str(&format!("inference (alpha = {})\n", g6(inf.alpha)));
        out.push_str(&format!("  center: {}\n", vec_g6(&inf.center)));
        for interval in &inf.intervals {
            out.push_str(&format!(
                "  {:<width$}  [{}, {}]\n",
                interval.name,
                g6(interval.lower),
                g6(interval.upper)
            ));
        }
        out.push_str(&format!(
            "  joint region: quadratic form radius {} with shape rows\n",
            g6(inf.joint_region.radius)
        ));
        for row in &inf.joint_region.shape {
            out.push_str(&format!("    {}\n", vec_g6(row)));
        }
        out
    }
}
