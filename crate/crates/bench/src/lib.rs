//! Shared inputs for the estimator benchmarks.

use chrono::NaiveDate;
use econokit_core::simulate::{simulate_var, white_noise_columns};
use econokit_core::DatedSeries;
use nalgebra::DMatrix;

pub fn var_names() -> Vec<String> {
    ["GROWTHC", "GSENSEX", "GEX"].map(String::from).to_vec()
}

/// Three stationary columns from a VAR(1), `n` rows.
pub fn var_columns(n: usize) -> Vec<Vec<f64>> {
    let a = DMatrix::from_row_slice(3, 3, &[0.4, 0.1, 0.0, 0.1, 0.2, 0.1, 0.0, -0.1, 0.3]);
    simulate_var(&[a], &[0.0; 3], &DMatrix::identity(3, 3), n, 1)
}

/// A response and `k` regressors with `n` rows.
pub fn regression(n: usize, k: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let mut cols = white_noise_columns(2, k + 1, n);
    let y = cols.remove(0);
    (y, cols)
}

pub fn daily_series(n: usize) -> DatedSeries {
    let start = NaiveDate::from_ymd_opt(2020, 3, 11).expect("valid date");
    DatedSeries::daily("GROWTHC", start, var_columns(n).remove(0)).expect("dense daily series")
}
