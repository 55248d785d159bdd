//! Report serialization and atomic file output.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use econokit_core::study::RoundReport;
use econokit_core::var::IrfResult;

use crate::render;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Table => "txt",
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

/// Writes `contents` to a sibling temp file, then renames it into place so
/// readers never observe a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

pub fn report_json(report: &RoundReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
    s.push('\n');
    s
}

/// Plot data in long form: `panel,series,component,x,value`.
///
/// Panels are `regression` and `var` (actual, fitted and residual by date)
/// and `irf` (response by horizon, `impulse->response` as the series).
pub fn report_csv(report: &RoundReport, precision: usize) -> String {
    let mut out = String::from("panel,series,component,x,value\n");
    let p = precision;
    for reg in &report.regressions {
        let series = format!("{}~{}", reg.response, reg.regressors.join("+"));
        for (i, d) in reg.dates.iter().enumerate() {
            let _ = writeln!(out, "regression,{series},actual,{d},{:.p$}", reg.actual[i]);
            let _ = writeln!(out, "regression,{series},fitted,{d},{:.p$}", reg.fit.fitted[i]);
            let _ = writeln!(out, "regression,{series},residual,{d},{:.p$}", reg.fit.residuals[i]);
        }
    }
    if let Some(v) = &report.var {
        for (name, eq) in v.fit.variables.iter().zip(&v.fit.equations) {
            for (i, d) in v.dates.iter().enumerate() {
                let actual = eq.fitted[i] + eq.residuals[i];
                let _ = writeln!(out, "var,{name},actual,{d},{actual:.p$}");
                let _ = writeln!(out, "var,{name},fitted,{d},{:.p$}", eq.fitted[i]);
                let _ = writeln!(out, "var,{name},residual,{d},{:.p$}", eq.residuals[i]);
            }
        }
    }
    for irf in &report.impulse_responses {
        for (h, v) in irf.values.iter().enumerate() {
            let _ = writeln!(out, "irf,{}->{},response,{h},{v:.p$}", irf.impulse, irf.response);
        }
        let rh = irf
            .return_horizon
            .map_or_else(|| "NA".to_string(), |x| format!("{x:.p$}"));
        let _ = writeln!(out, "irf,{}->{},return_horizon,,{rh}", irf.impulse, irf.response);
    }
    out
}

pub fn report_text(report: &RoundReport, format: Format, precision: usize) -> String {
    match format {
        Format::Table => render::report(report, precision),
        Format::Json => report_json(report),
        Format::Csv => report_csv(report, precision),
    }
}

/// `horizon,response` rows followed by a trailing return-horizon row.
pub fn irf_csv(irf: &IrfResult, precision: usize) -> String {
    let p = precision;
    let mut out = String::from("horizon,response\n");
    for (h, v) in irf.values.iter().enumerate() {
        let _ = writeln!(out, "{h},{v:.p$}");
    }
    let rh = irf
        .return_horizon
        .map_or_else(|| "NA".to_string(), |x| format!("{x:.p$}"));
    let _ = writeln!(out, "return_horizon,{rh}");
    out
}
