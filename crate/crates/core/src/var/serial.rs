use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{var_design, VarFit};
use crate::dist;
use crate::error::{Error, Result};
use crate::linalg;
use crate::linreg::fit_design;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LmMode {
    /// No serial correlation at lag `h` alone.
    AtLag,
    /// No serial correlation at lags `1..=h`.
    UpToLag,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LmTestRow {
    pub lag: usize,
    pub mode: LmMode,
    /// Edgeworth-corrected likelihood ratio statistic.
    pub lre_stat: f64,
    pub df: usize,
    pub p_value: f64,
    pub rao_f: f64,
    pub rao_df: (usize, f64),
    pub rao_p_value: f64,
}

/// Small-sample constants of the Rao F approximation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RaoConstants {
    /// Number of restrictions `q`.
    pub q: usize,
    pub s: f64,
    /// Effective sample size `N`.
    pub n: f64,
    /// Denominator degrees of freedom `N s - q/2 + 1`.
    pub df_denominator: f64,
}

impl RaoConstants {
    /// Rao F statistic implied by an LRE statistic.
    pub fn f_from_lre(&self, lre_stat: f64) -> f64 {
        let root = (-lre_stat / self.n / self.s).exp();
        (1.0 - root) / root * self.df_denominator / self.q as f64
    }
}

/// Rao F constants for a `k`-variable system with `t` observations, `m`
/// regressors per equation and `blocks` lagged residual blocks.
pub fn rao_df(t: usize, k: usize, m: usize, blocks: usize) -> RaoConstants {
    let (kf, hf) = (k as f64, blocks as f64);
    let q = k * k * blocks;
    let num = kf.powi(4) * hf * hf - 4.0;
    let den = kf * kf + kf * kf * hf * hf - 5.0;
    let s = if num > 0.0 && den > 0.0 {
        (num / den).sqrt()
    } else {
        1.0
    };
    let n = t as f64 - m as f64 - kf * hf - (kf - kf * hf + 1.0) / 2.0;
    RaoConstants {
        q,
        s,
        n,
        df_denominator: n * s - q as f64 / 2.0 + 1.0,
    }
}

/// LM test for residual serial correlation in a fitted VAR.
///
/// Each residual series is regressed on the original regressors plus lagged
/// residuals (lag `h` only, or lags `1..=h`), with pre-sample residuals set
/// to zero. The statistics compare the auxiliary and original residual
/// covariance determinants.
pub fn lm_serial_test(fit: &VarFit, h: usize, mode: LmMode) -> Result<LmTestRow> {
    if h == 0 {
        return Err(Error::Domain("LM test lag must be at least 1".into()));
    }
    let k = fit.k();
    let t = fit.n_obs;
    let m = fit.regressors_per_equation;
    let lags: Vec<usize> = match mode {
        LmMode::AtLag => vec![h],
        LmMode::UpToLag => (1..=h).collect(),
    };
    let blocks = lags.len();
    if t <= m + k * blocks || h >= t {
        return Err(Error::InsufficientData {
            needed: m + k * blocks + 1,
            available: t,
        });
    }

    let e = fit.residual_matrix();
    let mut design = var_design(&fit.variables, &fit.data, fit.lags, fit.lags);
    for &lag in &lags {
        for (l, var) in fit.variables.iter().enumerate() {
            let col = (0..t).map(|r| if r >= lag { e[(r - lag, l)] } else { 0.0 }).collect();
            design.push(format!("RESID_{var}(-{lag})"), col);
        }
    }
    let mut aux = DMatrix::zeros(t, k);
    for j in 0..k {
        let y: Vec<f64> = e.column(j).iter().copied().collect();
        let f = fit_design(&y, &design)?;
        aux.set_column(j, &nalgebra::DVector::from_vec(f.residuals));
    }
    let sigma_aux = aux.transpose() * &aux / t as f64;
    let ln_aux = linalg::ln_det_spd(&sigma_aux)?;
    let ln_orig = linalg::ln_det_spd(&fit.sigma_u_matrix())?;
    let ln_lambda = ln_aux - ln_orig;

    let rc = rao_df(t, k, m, blocks);
    let q = rc.q as f64;
    let lre_stat = -rc.n * ln_lambda;
    let rao_f = rc.f_from_lre(lre_stat);
    Ok(LmTestRow {
        lag: h,
        mode,
        lre_stat,
        df: rc.q,
        p_value: dist::chi2_upper_tail(lre_stat.max(0.0), q),
        rao_f,
        rao_df: (rc.q, rc.df_denominator),
        rao_p_value: dist::f_upper_tail(rao_f, q, rc.df_denominator),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::white_noise_columns;
    use crate::var::fit_var;

    #[test]
    fn printed_degrees_of_freedom() {
        let c = rao_df(93, 3, 16, 1);
        assert_eq!(c.q, 9);
        assert!((c.df_denominator - 175.4).abs() < 0.1);
        assert!((rao_df(93, 3, 16, 2).df_denominator - 195.6).abs() < 0.1);
        assert!((rao_df(93, 3, 16, 3).df_denominator - 193.4).abs() < 0.1);
    }

    #[test]
    fn printed_lre_and_rao_pairs_agree() {
        // single-lag rows use one residual block
        let c = rao_df(93, 3, 16, 1);
        assert!((c.f_from_lre(24.33359) - 2.8397).abs() < 5e-4);
        let c = rao_df(93, 3, 16, 2);
        assert!((c.f_from_lre(34.00352) - 1.97528).abs() < 5e-4);
    }

    #[test]
    fn single_lag_at_one_equals_cumulative_at_one() {
        let cols = white_noise_columns(4, 3, 80);
        let names: Vec<String> = ["A", "B", "C"].iter().map(|s| s.to_string()).collect();
        let fit = fit_var(&names, &cols, 2).unwrap();
        let a = lm_serial_test(&fit, 1, LmMode::AtLag).unwrap();
        let b = lm_serial_test(&fit, 1, LmMode::UpToLag).unwrap();
        assert!((a.lre_stat - b.lre_stat).abs() < 1e-10);
        let c = lm_serial_test(&fit, 3, LmMode::UpToLag).unwrap();
        assert_eq!(c.df, 27);
        let d = lm_serial_test(&fit, 3, LmMode::AtLag).unwrap();
        assert_eq!(d.df, 9);
        assert!(c.p_value > 0.0 && c.p_value < 1.0);
        assert!(lm_serial_test(&fit, 0, LmMode::AtLag).is_err());
    }

    #[test]
    fn detects_strong_residual_autocorrelation() {
        // VAR(1) fitted to a VAR(2) process leaves serially correlated residuals
        let a1 = DMatrix::identity(2, 2) * 0.2;
        let a2 = DMatrix::identity(2, 2) * 0.6;
        let cols = crate::simulate::simulate_var(&[a1, a2], &[0.0, 0.0], &DMatrix::identity(2, 2), 300, 5);
        let fit = fit_var(&["A".into(), "B".into()], &cols, 1).unwrap();
        let row = lm_serial_test(&fit, 2, LmMode::AtLag).unwrap();
        assert!(row.p_value < 1e-6);
    }
}
