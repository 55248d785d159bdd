use std::path::PathBuf;

use chrono::NaiveDate;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: line {line}: {message}")]
    Parse { path: PathBuf, line: u64, message: String },

    #[error("data error: {0}")]
    Data(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("coverage error: series `{series}` has no observation on or before {start}")]
    Coverage { series: String, start: NaiveDate },

    #[error("coverage error: series `{series}` is missing {missing} dates in {start}..={end}")]
    MissingDates {
        series: String,
        start: NaiveDate,
        end: NaiveDate,
        missing: usize,
    },

    #[error("insufficient data: need at least {needed} observations, have {available}")]
    InsufficientData { needed: usize, available: usize },

    #[error("singular design: column `{column}` is (numerically) collinear with earlier columns")]
    Singular { column: String },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("F-statistic is infinite (R-squared equals one)")]
    InfiniteF,

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Errors that come from the inputs (files, config, coverage) rather than
    /// from the estimation itself.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::Data(_)
                | Error::Coverage { .. }
                | Error::MissingDates { .. }
                | Error::Config(_)
                | Error::Io { .. }
        )
    }
}
