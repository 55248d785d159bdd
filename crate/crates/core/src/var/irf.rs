use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::VarFit;
use crate::error::{Error, Result};
use crate::linalg;

pub const DEFAULT_HORIZONS: usize = 10;
/// Band around zero, as a fraction of the peak absolute response.
pub const DEFAULT_THRESHOLD: f64 = 0.05;

/// Response of one variable to a one-standard-deviation orthogonalized
/// shock in another, over horizons `0..=H`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IrfResult {
    pub impulse: String,
    pub response: String,
    pub values: Vec<f64>,
    pub threshold: f64,
    pub return_horizon: Option<f64>,
}

impl IrfResult {
    pub fn horizons(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    /// Recomputes the return horizon for a different band.
    pub fn with_threshold(mut self, threshold: f64) -> Result<Self> {
        self.return_horizon = return_horizon(&self.values, threshold)?;
        self.threshold = threshold;
        Ok(self)
    }
}

/// `Psi_0 = impact`, `Psi_h = sum_{i=1..min(h,p)} A_i Psi_{h-i}`.
pub fn propagate(lag_matrices: &[DMatrix<f64>], impact: &DMatrix<f64>, horizons: usize) -> Vec<DMatrix<f64>> {
    let mut psi = Vec::with_capacity(horizons + 1);
    psi.push(impact.clone());
    for h in 1..=horizons {
        let mut next = DMatrix::zeros(impact.nrows(), impact.ncols());
        for (i, a) in lag_matrices.iter().enumerate().take(h) {
            next += a * &psi[h - 1 - i];
        }
        psi.push(next);
    }
    psi
}

/// Lower Cholesky factor of `sigma` under `order` (a permutation of
/// variable indices), expressed back in the original variable order.
fn ordered_impact(sigma: &DMatrix<f64>, order: &[usize]) -> Result<DMatrix<f64>> {
    let k = order.len();
    let permuted = DMatrix::from_fn(k, k, |a, b| sigma[(order[a], order[b])]);
    let l = linalg::cholesky_lower(&permuted)?;
    let mut impact = DMatrix::zeros(k, k);
    for a in 0..k {
        for b in 0..k {
            impact[(order[a], order[b])] = l[(a, b)];
        }
    }
    Ok(impact)
}

fn resolve_ordering(fit: &VarFit, ordering: &[String]) -> Result<Vec<usize>> {
    if ordering.is_empty() {
        return Ok((0..fit.k()).collect());
    }
    let mut idx = Vec::with_capacity(ordering.len());
    for name in ordering {
        let i = fit.variable_index(name).ok_or_else(|| {
            Error::Config(format!(
                "unknown variable `{name}`; expected one of {}",
                fit.variables.join(", ")
            ))
        })?;
        if idx.contains(&i) {
            return Err(Error::Config(format!("variable `{name}` repeated in ordering")));
        }
        idx.push(i);
    }
    if idx.len() != fit.k() {
        return Err(Error::Config(format!(
            "ordering must list all of {}",
            fit.variables.join(", ")
        )));
    }
    Ok(idx)
}

/// Cholesky-orthogonalized impulse responses for every (impulse, response)
/// pair, impulse-major. An empty `ordering` keeps the fit's variable order.
pub fn cholesky_irf(fit: &VarFit, horizons: usize, ordering: &[String]) -> Result<Vec<IrfResult>> {
    let order = resolve_ordering(fit, ordering)?;
    let impact = ordered_impact(&fit.sigma_a_matrix(), &order)?;
    let psi = propagate(&fit.lag_matrices(), &impact, horizons);
    let mut out = Vec::with_capacity(fit.k() * fit.k());
    for &i in &order {
        for j in 0..fit.k() {
            let values: Vec<f64> = psi.iter().map(|m| m[(j, i)]).collect();
            out.push(IrfResult {
                impulse: fit.variables[i].clone(),
                response: fit.variables[j].clone(),
                return_horizon: return_horizon(&values, DEFAULT_THRESHOLD)?,
                threshold: DEFAULT_THRESHOLD,
                values,
            });
        }
    }
    Ok(out)
}

/// Horizon at which the response enters the band `threshold * max|r|` for
/// good.
///
/// With `last` the final horizon still outside the band, the response
/// returns at `last + 1`. When `last` lies after the peak the crossing is
/// placed by linear interpolation between `last` and `last + 1`; when the
/// response drops inside the band right after its peak the integer horizon
/// is reported. `None` when the response never settles within the traced
/// horizons or is identically zero.
pub fn return_horizon(values: &[f64], threshold: f64) -> Result<Option<f64>> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::Domain(format!("threshold {threshold} must lie in (0, 1)")));
    }
    let abs: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    let (peak, peak_val) = abs
        .iter()
        .enumerate()
        .fold((0, 0.0), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    if !(peak_val > 0.0) {
        return Ok(None);
    }
    let band = threshold * peak_val;
    let last = abs.iter().rposition(|&v| v >= band).expect("peak is above the band");
    let next = last + 1;
    if next >= abs.len() {
        return Ok(None);
    }
    if last > peak {
        let frac = (abs[last] - band) / (abs[last] - abs[next]);
        Ok(Some(last as f64 + frac))
    } else {
        Ok(Some(next as f64))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn return_horizon_examples() {
        let r = [1.0, 0.5, 0.25, 0.04, 0.01, 0.0, 0.0];
        let h = return_horizon(&r, 0.05).unwrap().unwrap();
        assert!((h - (2.0 + 0.2 / 0.21)).abs() < 1e-12);
        assert!((h - 2.95).abs() < 0.005);
        assert_eq!(return_horizon(&[0.0; 11], 0.05).unwrap(), None);
        let mut imm = vec![0.0; 11];
        imm[0] = 1.0;
        assert_eq!(return_horizon(&imm, 0.05).unwrap(), Some(1.0));
        assert!(return_horizon(&imm, 0.0).is_err());
        assert!(return_horizon(&imm, 1.0).is_err());
    }

    #[test]
    fn never_settling_response_has_no_horizon() {
        let r: Vec<f64> = (0..11).map(|h| 0.9f64.powi(h)).collect();
        assert_eq!(return_horizon(&r, 0.05).unwrap(), None);
    }

    #[test]
    fn wider_band_returns_no_later() {
        let r: Vec<f64> = (0..11)
            .map(|h| (0.6f64).powi(h) * if h % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        let a = return_horizon(&r, 0.05).unwrap().unwrap();
        let b = return_horizon(&r, 0.10).unwrap().unwrap();
        assert!(b <= a);
    }

    #[test]
    fn propagation_closed_forms() {
        let k = 3;
        let eye = DMatrix::<f64>::identity(k, k);
        let psi = propagate(&[DMatrix::zeros(k, k)], &eye, 5);
        assert_eq!(psi[0], eye);
        assert!(psi[1..].iter().all(|m| m.iter().all(|v| *v == 0.0)));
        let psi = propagate(&[eye.clone() * 0.5], &eye, 10);
        for (h, m) in psi.iter().enumerate() {
            assert!((m[(1, 1)] - 0.5f64.powi(h as i32)).abs() < 1e-15);
            assert_eq!(m[(0, 1)], 0.0);
        }
    }

    #[test]
    fn ordering_permutes_cholesky() {
        let sigma = DMatrix::from_row_slice(2, 2, &[4.0, 1.0, 1.0, 2.0]);
        let natural = ordered_impact(&sigma, &[0, 1]).unwrap();
        assert_eq!(natural[(0, 1)], 0.0);
        let swapped = ordered_impact(&sigma, &[1, 0]).unwrap();
        assert_eq!(swapped[(1, 0)], 0.0);
        for p in [&natural, &swapped] {
            assert!((p * p.transpose() - &sigma).abs().max() < 1e-14);
        }
    }
}
