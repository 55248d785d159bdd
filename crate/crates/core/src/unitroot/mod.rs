//! Augmented Dickey-Fuller unit-root tests.
//!
//! The test regression is
//!
//! ```text
//! dy_t = tau * y_{t-1} + sum_{i=1..p} phi_i * dy_{t-i} [+ c] [+ delta * t] + e_t
//! ```
//!
//! and the statistic is the t-ratio on `tau`. Under automatic lag selection
//! the candidates `0..=maxlag` are compared by the Schwarz criterion on the
//! common sample implied by `maxlag`; the winner is then re-estimated on its
//! own maximal sample.

mod mackinnon;

pub use mackinnon::{
    asymptotic_critical, mackinnon_critical, mackinnon_pvalue, mackinnon_pvalue_finite, CriticalValues, Deterministic,
    Level,
};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linreg::{fit_design, Design, OlsFit};
use crate::series::{difference, DatedSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "value")]
pub enum LagSelection {
    /// Schwarz-criterion search over `0..=maxlag`.
    Auto,
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "value")]
pub enum MaxLag {
    Auto,
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdfSpec {
    pub deterministic: Deterministic,
    pub lag: LagSelection,
    pub maxlag: MaxLag,
    /// Test the first difference of the input instead of its level.
    pub difference: bool,
}

impl AdfSpec {
    pub fn auto(deterministic: Deterministic) -> Self {
        Self {
            deterministic,
            lag: LagSelection::Auto,
            maxlag: MaxLag::Auto,
            difference: false,
        }
    }

    pub fn fixed(deterministic: Deterministic, lag: usize) -> Self {
        Self {
            deterministic,
            lag: LagSelection::Fixed(lag),
            maxlag: MaxLag::Auto,
            difference: false,
        }
    }

    pub fn on_difference(mut self) -> Self {
        self.difference = true;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdfResult {
    /// Name of the tested series, `D(x)` when the difference was tested.
    pub tested: String,
    pub deterministic: Deterministic,
    pub statistic: f64,
    pub p_value: f64,
    pub critical_values: CriticalValues,
    pub lag: usize,
    /// The search bound used under automatic selection.
    pub maxlag: Option<usize>,
    pub n_obs: usize,
    pub sample_start: NaiveDate,
    pub sample_end: NaiveDate,
    /// Schwarz criterion of each candidate lag on the common sample.
    pub lag_search: Vec<f64>,
    pub regression: OlsFit,
}

impl AdfResult {
    /// Whether the unit-root null is rejected at `level`.
    pub fn rejects(&self, level: Level) -> bool {
        self.statistic < self.critical_values.get(level)
    }
}

/// Default lag search bound for a series with `n_effective` observations
/// after one differencing: `floor(min(n/3, 12) * (n/100)^(1/4))`.
pub fn auto_maxlag(n_effective: usize) -> Result<usize> {
    if n_effective < 4 {
        return Err(Error::InsufficientData {
            needed: 4,
            available: n_effective,
        });
    }
    let n = n_effective as f64;
    Ok(((n / 3.0).min(12.0) * (n / 100.0).powf(0.25)).floor() as usize)
}

struct Layout<'a> {
    /// the series being tested for a unit root
    y: &'a [f64],
    dates: &'a [NaiveDate],
    /// offset of `y[0]` in the original input, for the trend term
    trend_offset: usize,
    level_name: String,
    diff_name: Box<dyn Fn(usize) -> String + 'a>,
    deterministic: Deterministic,
}

impl Layout<'_> {
    fn k(&self, lag: usize) -> usize {
        1 + lag
            + match self.deterministic {
                Deterministic::None => 0,
                Deterministic::Constant => 1,
                Deterministic::ConstantTrend => 2,
            }
    }

    /// Regression rows are indexed by `t` in `y`, from `first` to the end.
    fn fit(&self, lag: usize, first: usize) -> Result<OlsFit> {
        let rows: Vec<usize> = (first..self.y.len()).collect();
        let n = rows.len();
        let k = self.k(lag);
        if n <= k {
            return Err(Error::InsufficientData {
                needed: first + k + 1,
                available: self.y.len(),
            });
        }
        let y = self.y;
        let dep: Vec<f64> = rows.iter().map(|&t| y[t] - y[t - 1]).collect();
        let mut design = Design::new().column(self.level_name.clone(), rows.iter().map(|&t| y[t - 1]).collect());
        for i in 1..=lag {
            design.push(
                (self.diff_name)(i),
                rows.iter().map(|&t| y[t - i] - y[t - i - 1]).collect(),
            );
        }
        match self.deterministic {
            Deterministic::None => {}
            Deterministic::Constant => design = design.constant(n),
            Deterministic::ConstantTrend => {
                design = design.constant(n);
                design.push("@TREND", rows.iter().map(|&t| (t + self.trend_offset) as f64).collect());
            }
        }
        fit_design(&dep, &design)
    }
}

/// Runs the augmented Dickey-Fuller test on `series` (or its first
/// difference, per `spec.difference`).
pub fn adf_test(series: &DatedSeries, spec: &AdfSpec) -> Result<AdfResult> {
    let name = series.name().to_string();
    let working;
    let (y, dates, trend_offset, tested, level_name, diff_name): (_, _, _, _, _, Box<dyn Fn(usize) -> String>) =
        if spec.difference {
            working = difference(series, 1)?;
            let n1 = name.clone();
            (
                working.values(),
                working.dates(),
                1,
                format!("D({name})"),
                format!("D({name}(-1))"),
                Box::new(move |i| format!("D({n1}(-{i}),2)")),
            )
        } else {
            let n1 = name.clone();
            (
                series.values(),
                series.dates(),
                0,
                name.clone(),
                format!("{name}(-1)"),
                Box::new(move |i| format!("D({n1}(-{i}))")),
            )
        };

    if y.len() < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            available: y.len(),
        });
    }
    let first = y[0];
    if y.iter().all(|v| *v == first) {
        return Err(Error::Degenerate(format!("`{tested}` is constant")));
    }

    let layout = Layout {
        y,
        dates,
        trend_offset,
        level_name,
        diff_name,
        deterministic: spec.deterministic,
    };

    let maxlag = match spec.maxlag {
        MaxLag::Fixed(m) => m,
        MaxLag::Auto => auto_maxlag(series.len().saturating_sub(1))?,
    };

    let (lag, lag_search, searched) = match spec.lag {
        LagSelection::Fixed(p) => (p, Vec::new(), None),
        LagSelection::Auto => {
            let mut sic = Vec::with_capacity(maxlag + 1);
            for p in 0..=maxlag {
                sic.push(layout.fit(p, maxlag + 1)?.sc);
            }
            let best = sic
                .iter()
                .enumerate()
                .fold((0, f64::INFINITY), |acc, (p, &v)| if v < acc.1 { (p, v) } else { acc })
                .0;
            (best, sic, Some(maxlag))
        }
    };

    let regression = layout.fit(lag, lag + 1)?;
    let statistic = regression.coefficients[0].t_stat;
    let n_obs = regression.n_obs;
    if !statistic.is_finite() {
        return Err(Error::Degenerate(format!(
            "`{tested}` gives a non-finite ADF statistic"
        )));
    }
    Ok(AdfResult {
        tested,
        deterministic: spec.deterministic,
        statistic,
        p_value: mackinnon_pvalue_finite(statistic, spec.deterministic, n_obs.max(10))?,
        critical_values: CriticalValues::at(spec.deterministic, n_obs.max(10))?,
        lag,
        maxlag: searched,
        n_obs,
        sample_start: layout.dates[lag + 1],
        sample_end: *layout.dates.last().expect("non-empty"),
        lag_search,
        regression,
    })
}
