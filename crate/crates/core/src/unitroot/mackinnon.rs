//! MacKinnon response surfaces for Dickey-Fuller critical values and
//! p-values (single-series case).
//!
//! Critical values use the finite-sample surfaces
//! `b_inf + b1/n + b2/n^2 + b3/n^3` from MacKinnon's updated tables
//! (Queen's Economics Department WP 1227, 2010). P-values use the asymptotic
//! normal-inverse polynomial surfaces (MacKinnon 1994, 1996), with a
//! finite-sample adjustment that maps the statistic through the 1/5/10%
//! critical values at `n` onto the asymptotic ones.

use serde::{Deserialize, Serialize};

use crate::dist::normal_cdf;
use crate::error::{Error, Result};

/// Deterministic terms in the test regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Deterministic {
    None,
    #[serde(rename = "const", alias = "constant")]
    Constant,
    #[serde(rename = "trend", alias = "constant_trend")]
    ConstantTrend,
}

impl Deterministic {
    pub fn label(self) -> &'static str {
        match self {
            Deterministic::None => "None",
            Deterministic::Constant => "Constant",
            Deterministic::ConstantTrend => "Constant, Linear Trend",
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            Deterministic::None => "none",
            Deterministic::Constant => "const",
            Deterministic::ConstantTrend => "trend",
        }
    }
}

impl std::str::FromStr for Deterministic {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "none" | "nc" | "n" => Ok(Deterministic::None),
            "const" | "constant" | "c" => Ok(Deterministic::Constant),
            "trend" | "ct" | "constant+trend" => Ok(Deterministic::ConstantTrend),
            other => Err(Error::Config(format!(
                "unknown deterministic variant `{other}` (expected none|const|trend)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Level {
    #[serde(rename = "1%")]
    One,
    #[serde(rename = "5%")]
    Five,
    #[serde(rename = "10%")]
    Ten,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::One, Level::Five, Level::Ten];

    pub fn probability(self) -> f64 {
        match self {
            Level::One => 0.01,
            Level::Five => 0.05,
            Level::Ten => 0.10,
        }
    }

    fn index(self) -> usize {
        match self {
            Level::One => 0,
            Level::Five => 1,
            Level::Ten => 2,
        }
    }
}

// [b_inf, b1, b2, b3] for 1%, 5%, 10%
const CV_NONE: [[f64; 4]; 3] = [
    [-2.56574, -2.2358, -3.627, 0.0],
    [-1.94100, -0.2686, -3.365, 31.223],
    [-1.61682, 0.2656, -2.714, 25.364],
];
const CV_CONST: [[f64; 4]; 3] = [
    [-3.43035, -6.5393, -16.786, -79.433],
    [-2.86154, -2.8903, -4.234, -40.040],
    [-2.56677, -1.5384, -2.809, 0.0],
];
const CV_TREND: [[f64; 4]; 3] = [
    [-3.95877, -9.0531, -28.428, -134.155],
    [-3.41049, -4.3904, -9.036, -45.374],
    [-3.12705, -2.5856, -3.925, -22.380],
];

struct PSurface {
    tau_max: f64,
    tau_min: f64,
    tau_star: f64,
    small: [f64; 3],
    large: [f64; 4],
}

const P_NONE: PSurface = PSurface {
    tau_max: f64::INFINITY,
    tau_min: -19.04,
    tau_star: -1.04,
    small: [0.6344, 1.2378, 3.2496e-2],
    large: [0.4797, 9.3557e-1, -0.6999e-1, 3.3066e-2],
};
const P_CONST: PSurface = PSurface {
    tau_max: 2.74,
    tau_min: -18.83,
    tau_star: -1.61,
    small: [2.1659, 1.4412, 3.8269e-2],
    large: [1.7339, 9.3202e-1, -1.2745e-1, -1.0368e-2],
};
const P_TREND: PSurface = PSurface {
    tau_max: 0.7,
    tau_min: -16.18,
    tau_star: -2.89,
    small: [3.2512, 1.6047, 4.9588e-2],
    large: [2.5261, 6.1654e-1, -3.7956e-1, -6.0285e-2],
};

const P_CLAMP: f64 = 1e-6;

fn cv_table(variant: Deterministic) -> &'static [[f64; 4]; 3] {
    match variant {
        Deterministic::None => &CV_NONE,
        Deterministic::Constant => &CV_CONST,
        Deterministic::ConstantTrend => &CV_TREND,
    }
}

fn p_surface(variant: Deterministic) -> &'static PSurface {
    match variant {
        Deterministic::None => &P_NONE,
        Deterministic::Constant => &P_CONST,
        Deterministic::ConstantTrend => &P_TREND,
    }
}

/// Asymptotic critical value (the `b_inf` term).
pub fn asymptotic_critical(variant: Deterministic, level: Level) -> f64 {
    cv_table(variant)[level.index()][0]
}

/// Finite-sample critical value for a test regression with `n` included
/// observations.
pub fn mackinnon_critical(variant: Deterministic, level: Level, n: usize) -> Result<f64> {
    if n < 10 {
        return Err(Error::Domain(format!(
            "critical values need at least 10 observations, got {n}"
        )));
    }
    let b = cv_table(variant)[level.index()];
    let x = 1.0 / n as f64;
    Ok(b[0] + x * (b[1] + x * (b[2] + x * b[3])))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalValues {
    pub one: f64,
    pub five: f64,
    pub ten: f64,
}

impl CriticalValues {
    pub fn at(variant: Deterministic, n: usize) -> Result<Self> {
        Ok(Self {
            one: mackinnon_critical(variant, Level::One, n)?,
            five: mackinnon_critical(variant, Level::Five, n)?,
            ten: mackinnon_critical(variant, Level::Ten, n)?,
        })
    }

    pub fn asymptotic(variant: Deterministic) -> Self {
        Self {
            one: asymptotic_critical(variant, Level::One),
            five: asymptotic_critical(variant, Level::Five),
            ten: asymptotic_critical(variant, Level::Ten),
        }
    }

    pub fn get(&self, level: Level) -> f64 {
        match level {
            Level::One => self.one,
            Level::Five => self.five,
            Level::Ten => self.ten,
        }
    }
}

fn polyval(coefs: &[f64], x: f64) -> f64 {
    // coefficients in ascending powers
    coefs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// One-sided p-value from the asymptotic surface, clamped to
/// `[1e-6, 1 - 1e-6]`.
pub fn mackinnon_pvalue(statistic: f64, variant: Deterministic) -> Result<f64> {
    if !statistic.is_finite() {
        return Err(Error::Domain(format!("non-finite test statistic {statistic}")));
    }
    let s = p_surface(variant);
    let p = if statistic > s.tau_max {
        1.0
    } else if statistic < s.tau_min {
        0.0
    } else if statistic <= s.tau_star {
        normal_cdf(polyval(&s.small, statistic))
    } else {
        normal_cdf(polyval(&s.large, statistic))
    };
    Ok(p.clamp(P_CLAMP, 1.0 - P_CLAMP))
}

/// P-value for a statistic from a regression with `n` included observations.
///
/// The statistic is mapped piecewise-linearly from the finite-sample
/// critical values at `n` onto the asymptotic ones (extrapolating the end
/// segments) before evaluating the asymptotic surface, so that a statistic
/// equal to the 5% critical value at `n` gets p = 0.05.
pub fn mackinnon_pvalue_finite(statistic: f64, variant: Deterministic, n: usize) -> Result<f64> {
    if !statistic.is_finite() {
        return Err(Error::Domain(format!("non-finite test statistic {statistic}")));
    }
    let finite = CriticalValues::at(variant, n)?;
    let asym = CriticalValues::asymptotic(variant);
    let knots = [(finite.one, asym.one), (finite.five, asym.five), (finite.ten, asym.ten)];
    let seg = if statistic <= knots[1].0 { 0 } else { 1 };
    let (x0, y0) = knots[seg];
    let (x1, y1) = knots[seg + 1];
    let mapped = y0 + (statistic - x0) * (y1 - y0) / (x1 - x0);
    mackinnon_pvalue(mapped, variant)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_value_examples() {
        let v = mackinnon_critical(Deterministic::None, Level::One, 20).unwrap();
        assert!((v - -2.6857).abs() < 5e-3);
        let v = mackinnon_critical(Deterministic::Constant, Level::Five, 20).unwrap();
        assert!((v - -3.0207).abs() < 5e-3);
        let v = mackinnon_critical(Deterministic::ConstantTrend, Level::Ten, 13).unwrap();
        assert!((v - -3.3630).abs() < 5e-3);
        assert!(mackinnon_critical(Deterministic::None, Level::One, 9).is_err());
    }

    #[test]
    fn critical_values_are_ordered() {
        for variant in [
            Deterministic::None,
            Deterministic::Constant,
            Deterministic::ConstantTrend,
        ] {
            for n in [10, 13, 20, 50, 100, 1000, 100_000] {
                let cv = CriticalValues::at(variant, n).unwrap();
                assert!(cv.one < cv.five && cv.five < cv.ten, "{variant:?} n={n}");
            }
        }
    }

    #[test]
    fn asymptotic_critical_values_have_nominal_size() {
        for variant in [
            Deterministic::None,
            Deterministic::Constant,
            Deterministic::ConstantTrend,
        ] {
            for level in Level::ALL {
                let p = mackinnon_pvalue(asymptotic_critical(variant, level), variant).unwrap();
                assert!((p - level.probability()).abs() < 0.005, "{variant:?} {level:?}: {p}");
            }
        }
    }

    #[test]
    fn finite_sample_pvalue_is_exact_at_knots() {
        for n in [13, 20, 97] {
            let cv = CriticalValues::at(Deterministic::Constant, n).unwrap();
            let p = mackinnon_pvalue_finite(cv.five, Deterministic::Constant, n).unwrap();
            assert!((p - 0.05).abs() < 0.005);
        }
    }

    #[test]
    fn printed_pvalue_round_b() {
        // constant variant, 18 included observations
        let p = mackinnon_pvalue_finite(-3.650822, Deterministic::Constant, 18).unwrap();
        assert!((p - 0.015).abs() < 0.0015, "{p}");
    }

    #[test]
    fn pvalue_near_one_at_zero() {
        for variant in [
            Deterministic::None,
            Deterministic::Constant,
            Deterministic::ConstantTrend,
        ] {
            assert!(mackinnon_pvalue(0.0, variant).unwrap() > 0.5);
        }
        assert!(mackinnon_pvalue(0.0, Deterministic::Constant).unwrap() > 0.9);
        assert!(mackinnon_pvalue(0.0, Deterministic::ConstantTrend).unwrap() > 0.9);
    }

    #[test]
    fn pvalue_is_monotone_and_clamped() {
        for variant in [
            Deterministic::None,
            Deterministic::Constant,
            Deterministic::ConstantTrend,
        ] {
            let mut last = 0.0;
            let mut t = -25.0;
            while t < 5.0 {
                let p = mackinnon_pvalue(t, variant).unwrap();
                assert!(p >= last - 2e-3, "{variant:?} at {t}");
                assert!((P_CLAMP..=1.0 - P_CLAMP).contains(&p));
                last = p;
                t += 0.01;
            }
        }
        assert!(mackinnon_pvalue(f64::NAN, Deterministic::None).is_err());
    }
}
