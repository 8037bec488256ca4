//! Bundled case-study data.

use crate::matrix::DenseMatrix;

/// Three light-deflection measurements with their published probable
/// errors: a direct-measurement problem (design = column of ones) with
/// heteroscedastic errors.
pub fn eclipse_values() -> Vec<f64> {
    vec![1.98, 1.61, 0.93]
}

/// Probable errors paired with [`eclipse_values`].
pub fn eclipse_probable_errors() -> Vec<f64> {
    vec![0.12, 0.30, 0.60]
}

/// Variant of the probable errors with the third observation trusted
/// more (0.4 instead of 0.6); used to probe sensitivity of the selected
/// estimate to the weighting.
pub fn eclipse_probable_errors_variant() -> Vec<f64> {
    vec![0.12, 0.30, 0.40]
}

const DIABETES_X1: [f64; 10] =
    [-0.061, -0.051, 0.059, -0.271, 0.109, 0.099, -0.101, 0.149, 0.089, -0.021];
const DIABETES_X2: [f64; 10] =
    [-0.055, -0.055, 0.065, -0.255, 0.085, 0.095, -0.085, 0.155, 0.065, -0.015];
const DIABETES_NOISE: [f64; 10] = [
    0.3132, 0.9672, 1.5252, -0.7748, -1.0008, -1.6578, -0.4138, 1.6742, -0.3428, -0.2898,
];
const DIABETES_Y: [f64; 10] = [
    -0.0918, 0.9622, 1.4802, -2.1798, 0.2142, -1.2128, -1.3088, 1.8992, 0.8122, -0.5748,
];

/// Two strongly collinear centered regressors from a glucose/insulin
/// response experiment (10 observations).
pub fn diabetes_design() -> DenseMatrix<f64> {
    let rows: Vec<Vec<f64>> = DIABETES_X1
        .iter()
        .zip(&DIABETES_X2)
        .map(|(&a, &b)| vec![a, b])
        .collect();
    DenseMatrix::from_rows(&rows).expect("static data is well formed")
}

/// Observed responses paired with [`diabetes_design`].
pub fn diabetes_response() -> Vec<f64> {
    DIABETES_Y.to_vec()
}

/// The noise realization used to synthesize the responses; kept for
/// consistency checks, never used by a fit.
pub fn diabetes_noise() -> Vec<f64> {
    DIABETES_NOISE.to_vec()
}

/// Coefficients that generated the responses.
pub fn diabetes_beta_true() -> [f64; 2] {
    [40.0, -37.0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn responses_are_design_times_truth_plus_noise() {
        let x = diabetes_design();
        let y = diabetes_response();
        let eps = diabetes_noise();
        let [b1, b2] = diabetes_beta_true();
        for i in 0..10 {
            let model = b1 * x.get(i, 0) + b2 * x.get(i, 1) + eps[i];
            assert!((model - y[i]).abs() < 1e-10, "row {i}: {model} vs {}", y[i]);
        }
    }

    #[test]
    fn dimensions_agree() {
        assert_eq!(eclipse_values().len(), eclipse_probable_errors().len());
        assert_eq!(eclipse_values().len(), eclipse_probable_errors_variant().len());
        assert_eq!(diabetes_design().rows(), diabetes_response().len());
    }
}
