//! Seeded simulators: Gaussian VAR processes, random walks, and a synthetic
//! three-series dataset shaped like the study inputs (cumulative cases, a
//! stock index and an exchange rate, the latter two with weekend gaps).

use chrono::{Datelike, NaiveDate, Weekday};
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg;
use crate::series::DatedSeries;

const BURN_IN: usize = 200;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// `k` independent standard normal columns of length `n`.
pub fn white_noise_columns(seed: u64, k: usize, n: usize) -> Vec<Vec<f64>> {
    let mut r = rng(seed);
    (0..k).map(|_| (0..n).map(|_| normal(&mut r)).collect()).collect()
}

/// Driftless Gaussian random walk starting at zero.
pub fn random_walk(seed: u64, n: usize) -> Vec<f64> {
    let mut r = rng(seed);
    let mut level = 0.0;
    (0..n)
        .map(|_| {
            level += normal(&mut r);
            level
        })
        .collect()
}

/// Simulates `y_t = c + sum_i A_i y_{t-i} + u_t` with `u_t ~ N(0, sigma)`,
/// discarding a burn-in. Returns one column per variable.
///
/// # Panics
/// If `sigma` is not positive definite or the shapes disagree.
pub fn simulate_var(
    lag_matrices: &[DMatrix<f64>],
    intercept: &[f64],
    sigma: &DMatrix<f64>,
    n: usize,
    seed: u64,
) -> Vec<Vec<f64>> {
    let k = intercept.len();
    let p = lag_matrices.len();
    let chol = linalg::cholesky_lower(sigma).expect("innovation covariance must be positive definite");
    let c = DVector::from_column_slice(intercept);
    let mut r = rng(seed);
    let total = n + BURN_IN;
    let mut ys: Vec<DVector<f64>> = vec![DVector::zeros(k); p];
    for _ in 0..total {
        let z = DVector::from_fn(k, |_, _| normal(&mut r));
        let mut y = &c + &chol * z;
        for (i, a) in lag_matrices.iter().enumerate() {
            y += a * &ys[ys.len() - 1 - i];
        }
        ys.push(y);
    }
    let kept = &ys[ys.len() - n..];
    (0..k).map(|j| kept.iter().map(|y| y[j]).collect()).collect()
}

/// Raw inputs shaped like the study data.
#[derive(Debug, Clone)]
pub struct DemoData {
    pub cases: DatedSeries,
    pub sensex: DatedSeries,
    pub fx: DatedSeries,
}

/// Synthetic inputs from `start` through `end`. Cases are recorded daily;
/// the index and exchange rate skip weekends, as market data do.
pub fn demo_dataset(seed: u64, start: NaiveDate, end: NaiveDate) -> DemoData {
    let mut r = rng(seed);
    let days: Vec<NaiveDate> = start.iter_days().take_while(|d| *d <= end).collect();

    let mut cases = Vec::with_capacity(days.len());
    let mut level: f64 = 40.0;
    let n = days.len() as f64;
    for (i, _) in days.iter().enumerate() {
        // growth decays from roughly 20% to 3% a day, with noise
        let trend = 0.03 + 0.17 * (-(i as f64) / (0.25 * n)).exp();
        let g = (trend + 0.02 * normal(&mut r)).max(0.001);
        level *= 1.0 + g;
        cases.push(level.round().max(1.0));
    }

    let mut market = |start_level: f64, drift: f64, vol: f64, shock: f64| {
        let mut dates = Vec::new();
        let mut values = Vec::new();
        let mut level = start_level;
        let mut prev_ret = 0.0;
        for d in &days {
            if matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
                continue;
            }
            let case_pull = shock * normal(&mut r);
            let ret = drift + 0.2 * prev_ret + vol * normal(&mut r) + case_pull;
            level *= 1.0 + ret;
            prev_ret = ret;
            dates.push(*d);
            values.push((level * 100.0).round() / 100.0);
        }
        (dates, values)
    };
    let (sx_dates, sx_values) = market(29_000.0, 0.0005, 0.025, 0.005);
    let (fx_dates, fx_values) = market(74.5, 0.0001, 0.003, 0.001);

    DemoData {
        cases: DatedSeries::daily("cases", start, cases).expect("synthetic cases are finite"),
        sensex: DatedSeries::new("sensex", sx_dates, sx_values).expect("synthetic index is valid"),
        fx: DatedSeries::new("fx", fx_dates, fx_values).expect("synthetic rate is valid"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_output_is_reproducible() {
        assert_eq!(random_walk(3, 50), random_walk(3, 50));
        assert_ne!(random_walk(3, 50), random_walk(4, 50));
        let s = NaiveDate::from_ymd_opt(2020, 3, 1).unwrap();
        let e = NaiveDate::from_ymd_opt(2020, 7, 1).unwrap();
        let a = demo_dataset(1, s, e);
        let b = demo_dataset(1, s, e);
        assert_eq!(a.sensex, b.sensex);
        assert_eq!(a.cases.len(), 123);
        assert!(a.fx.len() < a.cases.len());
        assert!(a.cases.values().windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn var_simulation_has_requested_shape() {
        let a = DMatrix::identity(2, 2) * 0.3;
        let cols = simulate_var(&[a], &[1.0, -1.0], &DMatrix::identity(2, 2), 400, 9);
        assert_eq!(cols.len(), 2);
        assert_eq!(cols[0].len(), 400);
        let mean0 = cols[0].iter().sum::<f64>() / 400.0;
        // stationary mean c / (1 - 0.3)
        assert!((mean0 - 1.0 / 0.7).abs() < 0.3);
    }
}
