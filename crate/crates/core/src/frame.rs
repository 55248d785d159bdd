//! Aligned growth-rate columns for one study window, plus the stationarity
//! decision that picks each column's form in the VAR.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{align_calendar, difference, growth_rate, DatedSeries};
use crate::unitroot::{adf_test, AdfResult, AdfSpec, Deterministic, LagSelection, Level, MaxLag};
use crate::window::StudyWindow;

/// Column names of the growth series, in frame order.
pub const VARIABLES: [&str; 3] = ["GROWTHC", "GSENSEX", "GEX"];

/// When to replace a growth column by its first difference.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiffPolicy {
    /// Difference when the ADF test on the level does not reject at 5%.
    #[default]
    Auto,
    Always,
    Never,
}

/// How one column is tested and transformed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnPolicy {
    pub deterministic: Deterministic,
    pub difference: DiffPolicy,
    pub lag: LagSelection,
    pub maxlag: MaxLag,
}

impl ColumnPolicy {
    pub fn auto(deterministic: Deterministic) -> Self {
        Self {
            deterministic,
            difference: DiffPolicy::Auto,
            lag: LagSelection::Auto,
            maxlag: MaxLag::Auto,
        }
    }

    fn adf_spec(&self, on_difference: bool) -> AdfSpec {
        AdfSpec {
            deterministic: self.deterministic,
            lag: self.lag,
            maxlag: self.maxlag,
            difference: on_difference,
        }
    }
}

/// Unit-root evidence for one column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stationarity {
    pub variable: String,
    pub level: AdfResult,
    /// Present when the column was differenced.
    pub difference: Option<AdfResult>,
    pub differenced: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyFrame {
    pub window: StudyWindow,
    /// Growth rates on every calendar day of the window.
    pub growthc: DatedSeries,
    pub gsensex: DatedSeries,
    pub gex: DatedSeries,
    pub stationarity: Vec<Stationarity>,
    /// Columns in the form used by the VAR (`D(X)` when differenced), trimmed
    /// to a shared index.
    pub model: Vec<DatedSeries>,
}

impl StudyFrame {
    pub fn columns(&self) -> [&DatedSeries; 3] {
        [&self.growthc, &self.gsensex, &self.gex]
    }

    pub fn differenced(&self) -> Vec<bool> {
        self.stationarity.iter().map(|s| s.differenced).collect()
    }

    pub fn dates(&self) -> &[NaiveDate] {
        self.growthc.dates()
    }

    pub fn model_names(&self) -> Vec<String> {
        self.model.iter().map(|s| s.name().to_string()).collect()
    }

    pub fn model_values(&self) -> Vec<Vec<f64>> {
        self.model.iter().map(|s| s.values().to_vec()).collect()
    }

    /// Level growth column by (case-insensitive) name.
    pub fn column(&self, name: &str) -> Option<&DatedSeries> {
        self.columns().into_iter().find(|s| s.name().eq_ignore_ascii_case(name))
    }
}

/// Growth rates of `raw` on every calendar day of `[start, end]`, using the
/// level on the day before `start` for the first value.
pub fn window_growth(raw: &DatedSeries, name: &str, start: NaiveDate, end: NaiveDate) -> Result<DatedSeries> {
    let from = start.pred_opt().expect("date after the calendar minimum");
    if let Some(last) = raw.last_date() {
        if last < end {
            return Err(Error::MissingDates {
                series: raw.name().to_string(),
                start: last.succ_opt().expect("date before the calendar maximum"),
                end,
                missing: (end - last).num_days() as usize,
            });
        }
    }
    let aligned = align_calendar(raw, from, end)?;
    Ok(growth_rate(&aligned)?.with_name(name))
}

fn growth_over(raw: &DatedSeries, name: &str, window: &StudyWindow) -> Result<DatedSeries> {
    window_growth(raw, name, window.start, window.end)
}

/// Builds the growth columns for `window` from raw levels and decides each
/// column's VAR form under `policies` (one per column, frame order).
pub fn build_frame(
    window: &StudyWindow,
    cases: &DatedSeries,
    index: &DatedSeries,
    fx: &DatedSeries,
    policies: &[ColumnPolicy; 3],
) -> Result<StudyFrame> {
    let growth = [
        growth_over(cases, VARIABLES[0], window)?,
        growth_over(index, VARIABLES[1], window)?,
        growth_over(fx, VARIABLES[2], window)?,
    ];

    let mut stationarity = Vec::with_capacity(3);
    let mut model = Vec::with_capacity(3);
    for (series, policy) in growth.iter().zip(policies) {
        let level = adf_test(series, &policy.adf_spec(false))?;
        let differenced = match policy.difference {
            DiffPolicy::Always => true,
            DiffPolicy::Never => false,
            DiffPolicy::Auto => !level.rejects(Level::Five),
        };
        let diff_test = if differenced {
            Some(adf_test(series, &policy.adf_spec(true))?)
        } else {
            None
        };
        model.push(if differenced {
            difference(series, 1)?.with_name(format!("D({})", series.name()))
        } else {
            series.clone()
        });
        stationarity.push(Stationarity {
            variable: series.name().to_string(),
            level,
            difference: diff_test,
            differenced,
        });
    }

    let trim = model.iter().map(|s| s.len()).max().unwrap_or(0) - model.iter().map(|s| s.len()).min().unwrap_or(0);
    if trim > 0 {
        let first = model.iter().map(|s| s.dates()[0]).max().expect("three columns");
        model = model.iter().map(|s| s.slice(first, window.end)).collect();
    }
    debug_assert!(model.windows(2).all(|w| w[0].dates() == w[1].dates()));

    let [growthc, gsensex, gex] = growth;
    Ok(StudyFrame {
        window: window.clone(),
        growthc,
        gsensex,
        gex,
        stationarity,
        model,
    })
}
