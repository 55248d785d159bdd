use serde::{Deserialize, Serialize};

use super::{fit_equations, loglik_from_ln_det, system_criteria};
use crate::dist;
use crate::error::{Error, Result};
use crate::linalg;

/// Which criteria select this lag.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Selected {
    pub lr: bool,
    pub fpe: bool,
    pub aic: bool,
    pub sc: bool,
    pub hq: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagOrderRow {
    pub lag: usize,
    pub log_likelihood: f64,
    /// Sequential modified LR statistic; absent at lag 0.
    pub lr: Option<f64>,
    pub fpe: f64,
    pub aic: f64,
    pub sc: f64,
    pub hq: f64,
    pub selected: Selected,
}

const LR_LEVEL: f64 = 0.05;

/// Final prediction error of a `k`-variable system with `m` regressors per
/// equation over `t` observations.
pub fn final_prediction_error(ln_det_sigma_u: f64, t: usize, m: usize, k: usize) -> f64 {
    let (tf, mf) = (t as f64, m as f64);
    (ln_det_sigma_u + k as f64 * ((tf + mf) / (tf - mf)).ln()).exp()
}

/// Modified LR statistic for adding one lag, where `m` counts the regressors
/// per equation of the larger model.
pub fn sequential_lr(t: usize, m: usize, ln_det_smaller: f64, ln_det_larger: f64) -> f64 {
    (t as f64 - m as f64) * (ln_det_smaller - ln_det_larger)
}

fn argmin(values: impl Iterator<Item = f64>) -> usize {
    values
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc })
        .0
}

/// Fits VAR(0)..VAR(`max_lag`) on the common sample that drops the first
/// `max_lag` rows and tabulates the selection criteria.
///
/// The LR column is tested sequentially from the largest lag down at 5%;
/// the first significant lag is selected, and lag 0 when none is.
pub fn lag_order_table(variables: &[String], columns: &[Vec<f64>], max_lag: usize) -> Result<Vec<LagOrderRow>> {
    super::validate_columns(variables, columns)?;
    let k = columns.len();
    let n_raw = columns[0].len();
    if n_raw <= max_lag || n_raw - max_lag <= k * max_lag + 1 {
        return Err(Error::InsufficientData {
            needed: max_lag + k * max_lag + 2,
            available: n_raw,
        });
    }
    let t = n_raw - max_lag;
    let kf = k as f64;

    let mut ln_dets = Vec::with_capacity(max_lag + 1);
    for p in 0..=max_lag {
        let (_, sigma) = fit_equations(variables, columns, p, max_lag)?;
        ln_dets.push(
            linalg::ln_det_spd(&sigma)
                .map_err(|_| Error::Degenerate(format!("residual covariance singular at lag {p}")))?,
        );
    }

    let mut rows: Vec<LagOrderRow> = ln_dets
        .iter()
        .enumerate()
        .map(|(p, &ln_det)| {
            let m = k * p + 1;
            let ll = loglik_from_ln_det(ln_det, t, k);
            let crit = system_criteria(ll, t, k * m);
            LagOrderRow {
                lag: p,
                log_likelihood: ll,
                lr: (p > 0).then(|| sequential_lr(t, m, ln_dets[p - 1], ln_det)),
                fpe: final_prediction_error(ln_det, t, m, k),
                aic: crit.aic,
                sc: crit.sc,
                hq: crit.hq,
                selected: Selected::default(),
            }
        })
        .collect();

    let lr_pick = (1..=max_lag)
        .rev()
        .find(|&p| dist::chi2_upper_tail(rows[p].lr.expect("lag > 0").max(0.0), kf * kf) < LR_LEVEL)
        .unwrap_or(0);
    rows[lr_pick].selected.lr = true;
    let fpe = argmin(rows.iter().map(|r| r.fpe));
    let aic = argmin(rows.iter().map(|r| r.aic));
    let sc = argmin(rows.iter().map(|r| r.sc));
    let hq = argmin(rows.iter().map(|r| r.hq));
    rows[fpe].selected.fpe = true;
    rows[aic].selected.aic = true;
    rows[sc].selected.sc = true;
    rows[hq].selected.hq = true;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::{simulate_var, white_noise_columns};
    use crate::var::fit_var;
    use nalgebra::DMatrix;

    fn names() -> Vec<String> {
        vec!["A".into(), "B".into(), "C".into()]
    }

    #[test]
    fn shape_and_single_stars() {
        let cols = white_noise_columns(12, 3, 60);
        let rows = lag_order_table(&names(), &cols, 4).unwrap();
        assert_eq!(rows.len(), 5);
        assert!(rows[0].lr.is_none());
        assert!(rows[1..].iter().all(|r| r.lr.is_some()));
        let count = |f: fn(&Selected) -> bool| rows.iter().filter(|r| f(&r.selected)).count();
        assert_eq!(count(|s| s.lr), 1);
        assert_eq!(count(|s| s.fpe), 1);
        assert_eq!(count(|s| s.aic), 1);
        assert_eq!(count(|s| s.sc), 1);
        assert_eq!(count(|s| s.hq), 1);
        // exhaustive argmin re-check
        let best_sc = rows.iter().min_by(|a, b| a.sc.total_cmp(&b.sc)).unwrap().lag;
        assert!(rows[best_sc].selected.sc);
    }

    #[test]
    fn rows_agree_with_var_fit_on_common_sample() {
        let cols = white_noise_columns(13, 3, 70);
        let rows = lag_order_table(&names(), &cols, 3).unwrap();
        // VAR(3) on the full data uses exactly the common sample
        let fit = fit_var(&names(), &cols, 3).unwrap();
        assert!((rows[3].log_likelihood - fit.log_likelihood).abs() < 1e-9);
        assert!((rows[3].aic - fit.aic).abs() < 1e-12);
        assert!((rows[3].sc - fit.sc).abs() < 1e-12);
    }

    #[test]
    fn lr_matches_loglik_difference() {
        let cols = white_noise_columns(14, 3, 90);
        let rows = lag_order_table(&names(), &cols, 2).unwrap();
        let t = 88.0;
        let m = 3.0 * 2.0 + 1.0;
        let want = (t - m) * 2.0 / t * (rows[2].log_likelihood - rows[1].log_likelihood);
        assert!((rows[2].lr.unwrap() - want).abs() < 1e-9);
    }

    #[test]
    fn selects_true_order_of_strong_var2() {
        let a1 = DMatrix::from_row_slice(3, 3, &[0.3, 0.1, 0.0, 0.0, 0.2, 0.1, 0.1, 0.0, 0.3]);
        let a2 = DMatrix::from_row_slice(3, 3, &[0.4, 0.0, 0.0, 0.0, -0.4, 0.0, 0.0, 0.1, 0.4]);
        let cols = simulate_var(&[a1, a2], &[0.0; 3], &DMatrix::identity(3, 3), 1000, 77);
        let rows = lag_order_table(&names(), &cols, 6).unwrap();
        assert!(rows[2].selected.sc && rows[2].selected.hq);
    }

    #[test]
    fn insufficient_sample() {
        let cols = white_noise_columns(1, 3, 12);
        assert!(lag_order_table(&names(), &cols, 4).is_err());
    }
}
