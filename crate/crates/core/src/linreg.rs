//! Ordinary least squares with the standard diagnostic block: coefficient
//! inference, goodness of fit, per-observation information criteria, the
//! overall F-test and the Durbin-Watson statistic.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dist;
use crate::error::{Error, Result};
use crate::linalg;

/// A named regressor matrix, one column per regressor.
#[derive(Debug, Clone, Default)]
pub struct Design {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
    constant: Option<usize>,
}

impl Design {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn column(mut self, name: impl Into<String>, values: Vec<f64>) -> Self {
        self.push(name, values);
        self
    }

    /// Appends a column of ones and marks the model as having an intercept.
    pub fn constant(mut self, n: usize) -> Self {
        self.constant = Some(self.columns.len());
        self.push("C", vec![1.0; n]);
        self
    }

    pub fn push(&mut self, name: impl Into<String>, values: Vec<f64>) {
        if let Some(first) = self.columns.first() {
            assert_eq!(first.len(), values.len(), "design columns must have equal length");
        }
        self.names.push(name.into());
        self.columns.push(values);
    }

    pub fn has_constant(&self) -> bool {
        self.constant.is_some()
    }

    pub fn n_rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    fn matrix(&self) -> DMatrix<f64> {
        let n = self.n_rows();
        DMatrix::from_fn(n, self.n_cols(), |i, j| self.columns[j][i])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub t_stat: f64,
    pub p_value: f64,
}

/// An OLS fit together with its full diagnostic block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OlsFit {
    pub coefficients: Vec<Coefficient>,
    pub r_squared: f64,
    pub adj_r_squared: f64,
    pub se_of_regression: f64,
    pub sum_squared_resid: f64,
    pub log_likelihood: f64,
    pub aic: f64,
    pub sc: f64,
    pub hq: f64,
    /// Absent for models without an intercept or with a single regressor.
    pub f_statistic: Option<f64>,
    pub prob_f: Option<f64>,
    pub durbin_watson: f64,
    pub mean_dependent: f64,
    pub sd_dependent: f64,
    pub n_obs: usize,
    pub k_params: usize,
    pub residuals: Vec<f64>,
    pub fitted: Vec<f64>,
}

impl OlsFit {
    pub fn coefficient(&self, name: &str) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.name == name)
    }

    pub fn estimates(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.estimate).collect()
    }
}

/// Fits `y` on the given regressor columns; with `intercept` a constant
/// named `C` is placed first.
pub fn fit_ols(y: &[f64], columns: &[Vec<f64>], intercept: bool) -> Result<OlsFit> {
    let mut design = Design::new();
    if intercept {
        design = design.constant(y.len());
    }
    for (i, c) in columns.iter().enumerate() {
        design.push(format!("X{}", i + 1), c.clone());
    }
    fit_design(y, &design)
}

/// Fits `y` on a named design.
pub fn fit_design(y: &[f64], design: &Design) -> Result<OlsFit> {
    let n = y.len();
    let k = design.n_cols();
    if k == 0 {
        return Err(Error::Domain("design has no regressors".into()));
    }
    if design.n_rows() != n {
        return Err(Error::Domain(format!(
            "response has {n} rows, design has {}",
            design.n_rows()
        )));
    }
    if n <= k {
        return Err(Error::InsufficientData {
            needed: k + 1,
            available: n,
        });
    }

    let x = design.matrix();
    let yv = DVector::from_column_slice(y);
    let ls = linalg::least_squares(&x, &yv).map_err(|j| Error::Singular {
        column: design.names[j].clone(),
    })?;

    let fitted_v = &x * &ls.coefficients;
    let fitted: Vec<f64> = fitted_v.iter().copied().collect();
    let residuals: Vec<f64> = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
    let ssr: f64 = residuals.iter().map(|e| e * e).sum();

    let nf = n as f64;
    let df = (n - k) as f64;
    let mean = y.iter().sum::<f64>() / nf;
    let tss: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let sd_dependent = (tss / (nf - 1.0)).sqrt();
    let s2 = ssr / df;

    let coefficients = (0..k)
        .map(|j| {
            let estimate = ls.coefficients[j];
            let std_error = (s2 * ls.xtx_inv[(j, j)]).sqrt();
            let t_stat = estimate / std_error;
            Coefficient {
                name: design.names[j].clone(),
                estimate,
                std_error,
                t_stat,
                p_value: dist::student_t_two_sided(t_stat, df),
            }
        })
        .collect();

    let r_squared = if tss > 0.0 { 1.0 - ssr / tss } else { f64::NAN };
    let adj_r_squared = adjusted_r_squared(r_squared, n, k);
    let log_likelihood = if ssr > 0.0 {
        log_likelihood_gaussian(ssr, n)?
    } else {
        f64::INFINITY
    };
    let ic = info_criteria(log_likelihood, n, k)?;

    let (f_statistic, prob_f) = if design.has_constant() && k >= 2 {
        match f_test(r_squared, n, k) {
            Ok(f) => (Some(f.statistic), Some(f.prob)),
            Err(Error::InfiniteF) => (Some(f64::INFINITY), Some(0.0)),
            Err(e) => return Err(e),
        }
    } else {
        (None, None)
    };

    let durbin_watson = if ssr > 0.0 {
        durbin_watson(&residuals)?
    } else {
        f64::NAN
    };

    Ok(OlsFit {
        coefficients,
        r_squared,
        adj_r_squared,
        se_of_regression: s2.sqrt(),
        sum_squared_resid: ssr,
        log_likelihood,
        aic: ic.aic,
        sc: ic.sc,
        hq: ic.hq,
        f_statistic,
        prob_f,
        durbin_watson,
        mean_dependent: mean,
        sd_dependent,
        n_obs: n,
        k_params: k,
        residuals,
        fitted,
    })
}

/// Concentrated Gaussian log-likelihood of a regression with sum of squared
/// residuals `ssr` over `n` observations.
pub fn log_likelihood_gaussian(ssr: f64, n: usize) -> Result<f64> {
    if !(ssr > 0.0) {
        return Err(Error::Domain(format!("log-likelihood needs ssr > 0, got {ssr}")));
    }
    if n == 0 {
        return Err(Error::Domain("log-likelihood needs n > 0".into()));
    }
    let nf = n as f64;
    Ok(-0.5 * nf * (1.0 + (2.0 * PI).ln() + (ssr / nf).ln()))
}

/// R-squared corrected for `k` fitted parameters over `n` observations.
pub fn adjusted_r_squared(r_squared: f64, n: usize, k: usize) -> f64 {
    1.0 - (1.0 - r_squared) * (n as f64 - 1.0) / (n as f64 - k as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfoCriteria {
    pub aic: f64,
    pub sc: f64,
    pub hq: f64,
}

/// Akaike, Schwarz and Hannan-Quinn criteria, all scaled per observation.
pub fn info_criteria(log_likelihood: f64, n: usize, k: usize) -> Result<InfoCriteria> {
    if n < 2 {
        return Err(Error::Domain(format!("information criteria need n >= 2, got {n}")));
    }
    if k == 0 {
        return Err(Error::Domain("information criteria need k >= 1".into()));
    }
    let nf = n as f64;
    let kf = k as f64;
    let base = -2.0 * log_likelihood;
    Ok(InfoCriteria {
        aic: (base + 2.0 * kf) / nf,
        sc: (base + kf * nf.ln()) / nf,
        hq: (base + 2.0 * kf * nf.ln().ln()) / nf,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FTest {
    pub statistic: f64,
    pub prob: f64,
}

/// Overall significance F-test of a model with an intercept and `k`
/// parameters in total.
pub fn f_test(r_squared: f64, n: usize, k: usize) -> Result<FTest> {
    if k < 2 {
        return Err(Error::NotApplicable(
            "F-test needs an intercept model with at least one slope".into(),
        ));
    }
    if n <= k {
        return Err(Error::InsufficientData {
            needed: k + 1,
            available: n,
        });
    }
    if !(0.0..=1.0).contains(&r_squared) {
        return Err(Error::Domain(format!("R-squared {r_squared} outside [0, 1]")));
    }
    if r_squared >= 1.0 {
        return Err(Error::InfiniteF);
    }
    let d1 = (k - 1) as f64;
    let d2 = (n - k) as f64;
    let statistic = (r_squared / d1) / ((1.0 - r_squared) / d2);
    Ok(FTest {
        statistic,
        prob: dist::f_upper_tail(statistic, d1, d2),
    })
}

pub fn durbin_watson(residuals: &[f64]) -> Result<f64> {
    if residuals.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            available: residuals.len(),
        });
    }
    let den: f64 = residuals.iter().map(|e| e * e).sum();
    if den == 0.0 {
        return Err(Error::Domain("Durbin-Watson undefined for all-zero residuals".into()));
    }
    let num: f64 = residuals.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum();
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_fit() {
        let fit = fit_ols(&[1.0, 2.0, 3.0, 4.0], &[vec![1.0, 2.0, 3.0, 4.0]], true);
        // exact fit: ssr = 0 so the likelihood is unbounded but the
        // coefficients are still well defined
        let fit = fit.unwrap();
        assert!((fit.coefficients[1].estimate - 1.0).abs() < 1e-12);
        assert!(fit.coefficients[0].estimate.abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn three_point_exact_fit() {
        let fit = fit_ols(&[1.0, 2.0, 3.0], &[vec![1.0, 2.0, 3.0]], true).unwrap();
        assert!((fit.coefficients[1].estimate - 1.0).abs() < 1e-12);
        assert!(fit.coefficients[0].estimate.abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hand_solved_fit() {
        // normal equations: [[3,6],[6,14]] b = [5,11] -> b = (2/3, 1/2)
        let fit = fit_ols(&[1.0, 2.0, 2.0], &[vec![1.0, 2.0, 3.0]], true).unwrap();
        assert!((fit.coefficients[0].estimate - 2.0 / 3.0).abs() < 1e-12);
        assert!((fit.coefficients[1].estimate - 0.5).abs() < 1e-12);
        assert!((fit.r_squared - 0.75).abs() < 1e-12);
        assert_eq!(fit.f_statistic.map(|f| (f - 3.0).abs() < 1e-9), Some(true));
    }

    #[test]
    fn rank_deficient_design() {
        let x = vec![1.0, 2.0, 3.0, 4.0, 5.0];
        let err = fit_ols(
            &[1.0, 3.0, 2.0, 5.0, 4.0],
            &[x.clone(), x.iter().map(|v| 2.0 * v).collect()],
            true,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Singular { ref column } if column == "X2"), "{err}");
    }

    #[test]
    fn too_few_observations() {
        let err = fit_ols(&[1.0, 2.0], &[vec![1.0, 2.0]], true).unwrap_err();
        assert!(matches!(
            err,
            Error::InsufficientData {
                needed: 3,
                available: 2
            }
        ));
    }

    #[test]
    fn printed_t_statistic() {
        let t: f64 = -0.212652 / 0.043388;
        assert!((t - -4.901204).abs() / 4.901204 < 1e-5);
    }

    #[test]
    fn log_likelihood_examples() {
        assert!((log_likelihood_gaussian(0.185343, 20).unwrap() - 18.43401).abs() < 1e-3);
        let n = 17;
        let unit = log_likelihood_gaussian(n as f64, n).unwrap();
        assert!((unit + 0.5 * n as f64 * (1.0 + (2.0 * PI).ln())).abs() < 1e-12);
        assert!((log_likelihood_gaussian(0.034878, 97).unwrap() - 246.997).abs() < 1e-2);
        assert!(matches!(log_likelihood_gaussian(0.0, 5), Err(Error::Domain(_))));
    }

    #[test]
    fn info_criteria_examples() {
        let ic = info_criteria(18.43401, 20, 2).unwrap();
        assert!((ic.aic - -1.643401).abs() < 1e-6);
        assert!((ic.sc - -1.543828).abs() < 1e-6);
        assert!((ic.hq - -1.623963).abs() < 1e-6);
        let ic = info_criteria(41.62912, 20, 1).unwrap();
        assert!((ic.aic - -4.062912).abs() < 1e-6);
        assert!((ic.sc - -4.013126).abs() < 1e-6);
        let ic = info_criteria(0.0, 25, 3).unwrap();
        assert!((ic.aic - 6.0 / 25.0).abs() < 1e-15);
        assert!(info_criteria(1.0, 1, 1).is_err());
    }

    #[test]
    fn f_test_examples() {
        let f = f_test(0.536679, 20, 2).unwrap();
        assert!((f.statistic - 20.84993).abs() < 1e-3);
        assert!((f.prob - 0.000239).abs() < 5e-7);
        let f = f_test(0.623746, 19, 3).unwrap();
        assert!((f.statistic - 13.26221).abs() < 1e-3);
        assert_eq!(f_test(0.0, 30, 4).unwrap().statistic, 0.0);
        assert!(matches!(f_test(1.0, 30, 4), Err(Error::InfiniteF)));
        assert!(matches!(f_test(0.3, 30, 1), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn durbin_watson_examples() {
        assert!((durbin_watson(&[1.0, -1.0, 1.0, -1.0]).unwrap() - 3.0).abs() < 1e-15);
        assert_eq!(durbin_watson(&[0.7; 6]).unwrap(), 0.0);
        assert!((durbin_watson(&[1.0, 0.0, -1.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(durbin_watson(&[0.0, 0.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn no_intercept_model_has_no_f() {
        let fit = fit_design(
            &[0.3, -0.1, 0.4, 0.2, -0.5],
            &Design::new().column("x", vec![1.0, 0.5, -0.2, 0.8, -1.0]),
        )
        .unwrap();
        assert!(fit.f_statistic.is_none());
        assert_eq!(fit.r_squared, fit.adj_r_squared);
    }

    fn instance() -> impl Strategy<Value = (Vec<f64>, Vec<Vec<f64>>)> {
        (3usize..20, 1usize..4).prop_flat_map(|(extra, k)| {
            let n = k + 2 + extra;
            (
                prop::collection::vec(-5.0f64..5.0, n),
                prop::collection::vec(prop::collection::vec(-3.0f64..3.0, n), k),
            )
        })
    }

    proptest! {
        #[test]
        fn fit_invariants((y, xs) in instance()) {
            let Ok(fit) = fit_ols(&y, &xs, true) else { return Ok(()); };
            let n = y.len() as f64;
            let k = fit.k_params as f64;
            for c in &fit.coefficients {
                prop_assert!((c.t_stat - c.estimate / c.std_error).abs() <= 1e-12 * c.t_stat.abs().max(1.0));
            }
            prop_assert!((fit.adj_r_squared - (1.0 - (1.0 - fit.r_squared) * (n - 1.0) / (n - k))).abs() < 1e-12);
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&fit.r_squared));
            let scale = y.iter().map(|v| v.abs()).fold(1.0, f64::max);
            for col in std::iter::once(vec![1.0; y.len()]).chain(xs.iter().cloned()) {
                let dot: f64 = col.iter().zip(&fit.residuals).map(|(a, b)| a * b).sum();
                prop_assert!(dot.abs() <= 1e-8 * scale * n);
            }
            for i in 0..y.len() {
                prop_assert!((fit.fitted[i] + fit.residuals[i] - y[i]).abs() < 1e-12 * scale);
            }
            if y.len() >= 8 {
                prop_assert!(fit.sc >= fit.aic);
            }
        }

        #[test]
        fn scaling_response((y, xs) in instance(), c in 0.1f64..50.0) {
            let Ok(a) = fit_ols(&y, &xs, true) else { return Ok(()); };
            let ys: Vec<f64> = y.iter().map(|v| c * v).collect();
            let b = fit_ols(&ys, &xs, true).unwrap();
            for (ca, cb) in a.coefficients.iter().zip(&b.coefficients) {
                prop_assert!((cb.estimate - c * ca.estimate).abs() <= 1e-9 * (c * ca.estimate).abs().max(1e-9 * c));
                prop_assert!((cb.std_error - c * ca.std_error).abs() <= 1e-9 * c * ca.std_error);
                prop_assert!((cb.t_stat - ca.t_stat).abs() <= 1e-8 * ca.t_stat.abs().max(1.0));
            }
            prop_assert!((a.r_squared - b.r_squared).abs() < 1e-10);
            prop_assert!((a.durbin_watson - b.durbin_watson).abs() < 1e-10);
            if let (Some(fa), Some(fb)) = (a.f_statistic, b.f_statistic) {
                prop_assert!((fa - fb).abs() <= 1e-8 * fa.max(1.0));
            }
        }
    }
}
