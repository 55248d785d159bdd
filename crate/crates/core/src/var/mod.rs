//! Vector autoregressions estimated equation by equation, plus the
//! diagnostics built on them: orthogonalized impulse responses, residual
//! serial-correlation LM tests and lag-order selection.

mod irf;
mod lag_order;
mod serial;

pub use irf::{cholesky_irf, propagate, return_horizon, IrfResult, DEFAULT_HORIZONS, DEFAULT_THRESHOLD};
pub use lag_order::{final_prediction_error, lag_order_table, sequential_lr, LagOrderRow, Selected};
pub use serial::{lm_serial_test, rao_df, LmMode, LmTestRow, RaoConstants};

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::linreg::{fit_design, Design, OlsFit};

/// A fitted VAR(p) with an intercept in every equation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarFit {
    pub variables: Vec<String>,
    pub lags: usize,
    /// One regression per variable, regressors ordered as
    /// `x1(-1)..x1(-p), x2(-1)..x2(-p), ..., C`.
    pub equations: Vec<OlsFit>,
    /// `E'E / T`
    pub sigma_u: Vec<Vec<f64>>,
    /// `E'E / (T - m)`
    pub sigma_a: Vec<Vec<f64>>,
    pub det_sigma_u: f64,
    pub det_sigma_a: f64,
    pub log_likelihood: f64,
    pub aic: f64,
    pub sc: f64,
    pub n_coefficients: usize,
    /// Effective observations `T`.
    pub n_obs: usize,
    /// Regressors per equation `m = K p + 1`.
    pub regressors_per_equation: usize,
    /// The input columns the system was fitted on (all rows, before lag trimming).
    pub data: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemCriteria {
    pub aic: f64,
    pub sc: f64,
    pub hq: f64,
}

impl VarFit {
    pub fn k(&self) -> usize {
        self.variables.len()
    }

    /// Coefficient matrix of lag `i` (1-based): entry `(j, l)` is the effect
    /// of `x_l(t-i)` in the equation for `x_j`.
    pub fn lag_matrix(&self, i: usize) -> DMatrix<f64> {
        assert!(i >= 1 && i <= self.lags, "lag {i} outside 1..={}", self.lags);
        let k = self.k();
        DMatrix::from_fn(k, k, |j, l| {
            self.equations[j].coefficients[l * self.lags + i - 1].estimate
        })
    }

    pub fn lag_matrices(&self) -> Vec<DMatrix<f64>> {
        (1..=self.lags).map(|i| self.lag_matrix(i)).collect()
    }

    pub fn intercepts(&self) -> Vec<f64> {
        let idx = self.k() * self.lags;
        self.equations.iter().map(|e| e.coefficients[idx].estimate).collect()
    }

    pub fn sigma_u_matrix(&self) -> DMatrix<f64> {
        from_rows(&self.sigma_u)
    }

    pub fn sigma_a_matrix(&self) -> DMatrix<f64> {
        from_rows(&self.sigma_a)
    }

    /// `T x K` matrix of residuals.
    pub fn residual_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n_obs, self.k(), |t, j| self.equations[j].residuals[t])
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.eq_ignore_ascii_case(name))
    }
}

pub(crate) fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

pub(crate) fn from_rows(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let n = rows.len();
    let k = rows.first().map_or(0, Vec::len);
    DMatrix::from_fn(n, k, |i, j| rows[i][j])
}

/// Gaussian system log-likelihood from `det(sigma_u)`.
pub fn system_loglik(det_sigma_u: f64, t: usize, k: usize) -> Result<f64> {
    if !(det_sigma_u > 0.0) || !det_sigma_u.is_finite() {
        return Err(Error::Domain(format!(
            "residual covariance determinant {det_sigma_u} is not positive"
        )));
    }
    Ok(loglik_from_ln_det(det_sigma_u.ln(), t, k))
}

pub(crate) fn loglik_from_ln_det(ln_det: f64, t: usize, k: usize) -> f64 {
    let t = t as f64;
    -(t * k as f64 / 2.0) * (1.0 + (2.0 * PI).ln()) - t / 2.0 * ln_det
}

/// Inverse of [`system_loglik`]: `ln det(sigma_u)` implied by a system
/// log-likelihood.
pub fn ln_det_from_loglik(log_likelihood: f64, t: usize, k: usize) -> f64 {
    let t = t as f64;
    -2.0 / t * (log_likelihood + (t * k as f64 / 2.0) * (1.0 + (2.0 * PI).ln()))
}

/// Per-observation system information criteria.
///
/// # Panics
/// If `t` is zero.
pub fn system_criteria(log_likelihood: f64, t: usize, n_coefficients: usize) -> SystemCriteria {
    assert!(t > 0, "system criteria need at least one observation");
    let tf = t as f64;
    let nc = n_coefficients as f64;
    SystemCriteria {
        aic: (-2.0 * log_likelihood + 2.0 * nc) / tf,
        sc: (-2.0 * log_likelihood + nc * tf.ln()) / tf,
        hq: (-2.0 * log_likelihood + 2.0 * nc * tf.ln().ln()) / tf,
    }
}

/// `X(-i)`, or `D(X(-i))` for a differenced variable named `D(X)`.
pub(crate) fn lag_name(var: &str, i: usize) -> String {
    match var.strip_prefix("D(").and_then(|v| v.strip_suffix(')')) {
        Some(inner) => format!("D({inner}(-{i}))"),
        None => format!("{var}(-{i})"),
    }
}

/// Regressor block shared by every equation: lags `1..=p` of each variable
/// then the constant, over rows `first..T_raw`.
pub(crate) fn var_design(variables: &[String], columns: &[Vec<f64>], p: usize, first: usize) -> Design {
    let n_raw = columns[0].len();
    let mut design = Design::new();
    for (var, col) in variables.iter().zip(columns) {
        for i in 1..=p {
            design.push(lag_name(var, i), (first..n_raw).map(|t| col[t - i]).collect());
        }
    }
    design.constant(n_raw - first)
}

/// Fits each equation on rows `first..T_raw` (`first >= p`).
pub(crate) fn fit_equations(
    variables: &[String],
    columns: &[Vec<f64>],
    p: usize,
    first: usize,
) -> Result<(Vec<OlsFit>, DMatrix<f64>)> {
    debug_assert!(first >= p);
    let design = var_design(variables, columns, p, first);
    let t = columns[0].len() - first;
    let k = columns.len();
    let mut equations = Vec::with_capacity(k);
    for col in columns {
        equations.push(fit_design(&col[first..], &design)?);
    }
    let e = DMatrix::from_fn(t, k, |r, j| equations[j].residuals[r]);
    let sigma_u = e.transpose() * &e / t as f64;
    Ok((equations, sigma_u))
}

fn validate_columns(variables: &[String], columns: &[Vec<f64>]) -> Result<()> {
    if columns.is_empty() {
        return Err(Error::Domain("VAR needs at least one variable".into()));
    }
    if variables.len() != columns.len() {
        return Err(Error::Domain(format!(
            "{} variable names for {} columns",
            variables.len(),
            columns.len()
        )));
    }
    let n = columns[0].len();
    if columns.iter().any(|c| c.len() != n) {
        return Err(Error::Domain("VAR columns must share one index".into()));
    }
    if columns.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Domain("VAR columns contain non-finite values".into()));
    }
    Ok(())
}

/// Fits a VAR(`p`) with intercept to the given columns.
pub fn fit_var(variables: &[String], columns: &[Vec<f64>], p: usize) -> Result<VarFit> {
    validate_columns(variables, columns)?;
    if p == 0 {
        return Err(Error::Domain("VAR lag order must be at least 1".into()));
    }
    let k = columns.len();
    let m = k * p + 1;
    let n_raw = columns[0].len();
    if n_raw <= m + p {
        return Err(Error::InsufficientData {
            needed: m + p + 1,
            available: n_raw,
        });
    }
    let (equations, sigma_u) = fit_equations(variables, columns, p, p)?;
    let t = n_raw - p;
    let sigma_a = &sigma_u * (t as f64 / (t - m) as f64);
    let ln_det_u =
        linalg::ln_det_spd(&sigma_u).map_err(|_| Error::Degenerate("VAR residual covariance is singular".into()))?;
    let ln_det_a = ln_det_u + k as f64 * (t as f64 / (t - m) as f64).ln();
    let log_likelihood = loglik_from_ln_det(ln_det_u, t, k);
    let n_coefficients = k * m;
    let crit = system_criteria(log_likelihood, t, n_coefficients);
    Ok(VarFit {
        variables: variables.to_vec(),
        lags: p,
        equations,
        sigma_u: to_rows(&sigma_u),
        sigma_a: to_rows(&sigma_a),
        det_sigma_u: ln_det_u.exp(),
        det_sigma_a: ln_det_a.exp(),
        log_likelihood,
        aic: crit.aic,
        sc: crit.sc,
        n_coefficients,
        n_obs: t,
        regressors_per_equation: m,
        data: columns.to_vec(),
    })
}

/// The `(K p x K p)` companion matrix of the lag polynomial.
pub fn companion_matrix(lag_matrices: &[DMatrix<f64>]) -> DMatrix<f64> {
    let p = lag_matrices.len();
    if p == 0 {
        return DMatrix::zeros(0, 0);
    }
    let k = lag_matrices[0].nrows();
    let mut c = DMatrix::zeros(k * p, k * p);
    for (i, a) in lag_matrices.iter().enumerate() {
        c.view_mut((0, i * k), (k, k)).copy_from(a);
    }
    for i in 0..k * (p - 1) {
        c[(k + i, i)] = 1.0;
    }
    c
}

/// Eigenvalue moduli of the companion matrix, largest first. All below one
/// means the system is stable.
pub fn companion_eigenvalues(fit: &VarFit) -> Vec<f64> {
    linalg::eigen_moduli(&companion_matrix(&fit.lag_matrices()))
}
