//! Date-indexed series: CSV ingestion, calendar alignment, growth rates and
//! differencing.

use std::path::Path;

use chrono::{Duration, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A calendar-date-indexed sequence of observations for one indicator.
///
/// Dates are strictly increasing. Construct through [`DatedSeries::new`],
/// which enforces that.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatedSeries {
    name: String,
    dates: Vec<NaiveDate>,
    values: Vec<f64>,
}

impl DatedSeries {
    pub fn new(name: impl Into<String>, dates: Vec<NaiveDate>, values: Vec<f64>) -> Result<Self> {
        let name = name.into();
        if dates.len() != values.len() {
            return Err(Error::Data(format!(
                "series `{name}`: {} dates but {} values",
                dates.len(),
                values.len()
            )));
        }
        for w in dates.windows(2) {
            if w[1] == w[0] {
                return Err(Error::Data(format!("series `{name}`: duplicate date {}", w[0])));
            }
            if w[1] < w[0] {
                return Err(Error::Data(format!(
                    "series `{name}`: dates not increasing ({} after {})",
                    w[1], w[0]
                )));
            }
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Data(format!(
                "series `{name}`: non-finite value on {}",
                dates[i]
            )));
        }
        Ok(Self { name, dates, values })
    }

    /// Builds a series on consecutive calendar days starting at `start`.
    pub fn daily(name: impl Into<String>, start: NaiveDate, values: Vec<f64>) -> Result<Self> {
        let dates = (0..values.len()).map(|i| start + Duration::days(i as i64)).collect();
        Self::new(name, dates, values)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn first_date(&self) -> Option<NaiveDate> {
        self.dates.first().copied()
    }

    pub fn last_date(&self) -> Option<NaiveDate> {
        self.dates.last().copied()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Observations with `start <= date <= end`.
    pub fn slice(&self, start: NaiveDate, end: NaiveDate) -> DatedSeries {
        let lo = self.dates.partition_point(|d| *d < start);
        let hi = self.dates.partition_point(|d| *d <= end);
        DatedSeries {
            name: self.name.clone(),
            dates: self.dates[lo..hi.max(lo)].to_vec(),
            values: self.values[lo..hi.max(lo)].to_vec(),
        }
    }

    /// Drops the first `n` observations.
    pub fn skip(&self, n: usize) -> DatedSeries {
        let n = n.min(self.len());
        DatedSeries {
            name: self.name.clone(),
            dates: self.dates[n..].to_vec(),
            values: self.values[n..].to_vec(),
        }
    }

    /// True when every calendar day between the first and last date is present.
    pub fn is_contiguous(&self) -> bool {
        self.dates.windows(2).all(|w| w[1] - w[0] == Duration::days(1))
    }
}

/// Reads a `date,value` CSV file into a series sorted by date.
pub fn load_series(path: impl AsRef<Path>, name: &str) -> Result<DatedSeries> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_series(file, path, name)
}

/// Parses `date,value` CSV content from any reader. `origin` is only used
/// in error messages.
pub fn read_series(reader: impl std::io::Read, origin: &Path, name: &str) -> Result<DatedSeries> {
    let parse_err = |line: u64, message: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        message,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    {
        let headers = rdr.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
        let cols: Vec<String> = headers.iter().map(|h| h.to_ascii_lowercase()).collect();
        if cols != ["date", "value"] {
            return Err(parse_err(
                1,
                format!("expected header `date,value`, found `{}`", cols.join(",")),
            ));
        }
    }

    let mut obs: Vec<(NaiveDate, f64, u64)> = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let (raw_date, raw_value) = (&record[0], &record[1]);
        let date = NaiveDate::parse_from_str(raw_date, "%Y-%m-%d")
            .map_err(|e| parse_err(line, format!("bad date `{raw_date}`: {e}")))?;
        let value: f64 = raw_value
            .parse()
            .map_err(|_| parse_err(line, format!("bad value `{raw_value}`")))?;
        if !value.is_finite() {
            return Err(parse_err(line, format!("non-finite value `{raw_value}`")));
        }
        obs.push((date, value, line));
    }
    if obs.is_empty() {
        return Err(Error::Data(format!("{}: no observations", origin.display())));
    }
    obs.sort_by_key(|o| o.0);
    for w in obs.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(Error::Data(format!(
                "{}: duplicate date {} (lines {} and {})",
                origin.display(),
                w[0].0,
                w[0].2.min(w[1].2),
                w[0].2.max(w[1].2)
            )));
        }
    }
    let (dates, values) = obs.into_iter().map(|(d, v, _)| (d, v)).unzip();
    DatedSeries::new(name, dates, values)
}

/// Places the series on every calendar day of `[start, end]`, filling gaps
/// with the most recent earlier observation.
pub fn align_calendar(series: &DatedSeries, start: NaiveDate, end: NaiveDate) -> Result<DatedSeries> {
    if end < start {
        return Err(Error::Domain(format!("empty window {start}..={end}")));
    }
    let first = series.dates.partition_point(|d| *d <= start);
    if first == 0 {
        return Err(Error::Coverage {
            series: series.name.clone(),
            start,
        });
    }
    let mut idx = first - 1;
    let days = (end - start).num_days() as usize + 1;
    let mut dates = Vec::with_capacity(days);
    let mut values = Vec::with_capacity(days);
    let mut day = start;
    for _ in 0..days {
        while idx + 1 < series.len() && series.dates[idx + 1] <= day {
            idx += 1;
        }
        dates.push(day);
        values.push(series.values[idx]);
        day += Duration::days(1);
    }
    Ok(DatedSeries {
        name: series.name.clone(),
        dates,
        values,
    })
}

/// Simple proportional growth `(x_t - x_{t-1}) / x_{t-1}`, dated at `t`.
pub fn growth_rate(series: &DatedSeries) -> Result<DatedSeries> {
    if series.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            available: series.len(),
        });
    }
    if let Some(i) = series.values.iter().position(|v| *v <= 0.0) {
        return Err(Error::Domain(format!(
            "growth rate of `{}` undefined: non-positive value {} on {}",
            series.name, series.values[i], series.dates[i]
        )));
    }
    let values = series.values.windows(2).map(|w| (w[1] - w[0]) / w[0]).collect();
    Ok(DatedSeries {
        name: series.name.clone(),
        dates: series.dates[1..].to_vec(),
        values,
    })
}

/// Applies the first difference `order` times.
pub fn difference(series: &DatedSeries, order: usize) -> Result<DatedSeries> {
    if order == 0 {
        return Err(Error::Domain("difference order must be positive".into()));
    }
    if series.len() <= order {
        return Err(Error::Domain(format!(
            "cannot difference `{}` of length {} to order {order}",
            series.name,
            series.len()
        )));
    }
    let mut values = series.values.clone();
    for _ in 0..order {
        values = values.windows(2).map(|w| w[1] - w[0]).collect();
    }
    Ok(DatedSeries {
        name: series.name.clone(),
        dates: series.dates[order..].to_vec(),
        values,
    })
}
