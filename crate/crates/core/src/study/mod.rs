//! Runs the full analysis for one study round and assembles a
//! machine-readable report.

mod config;

pub use config::{
    all_regressions, canonical_ordering, canonical_variable, AutoWord, Defaults, LagChoice, RoundConfig, StudyConfig,
};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{build_frame, Stationarity, StudyFrame};
use crate::linreg::{fit_design, Design, OlsFit};
use crate::series::DatedSeries;
use crate::unitroot::AdfResult;
use crate::var::{
    cholesky_irf, companion_eigenvalues, fit_var, lag_order_table, lm_serial_test, IrfResult, LagOrderRow, LmMode,
    LmTestRow, VarFit,
};
use crate::window::{RoundId, StudyWindow};

/// Version of the serialized report layout.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnSummary {
    pub variable: String,
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation (n - 1 divisor).
    pub sd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub variables: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl CorrelationMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.variables.iter().position(|v| v.eq_ignore_ascii_case(a))?;
        let j = self.variables.iter().position(|v| v.eq_ignore_ascii_case(b))?;
        Some(self.values[i][j])
    }
}

/// One regression among the level growth columns, with the dates needed to
/// plot actual, fitted and residual values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionReport {
    pub response: String,
    pub regressors: Vec<String>,
    pub dates: Vec<NaiveDate>,
    pub actual: Vec<f64>,
    pub fit: OlsFit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarReport {
    /// Effective sample, one date per residual row.
    pub dates: Vec<NaiveDate>,
    pub companion_moduli: Vec<f64>,
    pub stable: bool,
    pub fit: VarFit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Regression,
    Correlation,
    Var,
    ImpulseResponse,
    LmTest,
    LagOrder,
}

/// A late-stage failure recorded instead of aborting the round.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageError {
    pub stage: Stage,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundReport {
    pub schema_version: u32,
    pub round: RoundId,
    pub window: StudyWindow,
    /// False when the unit-root and regression sections have no published
    /// counterpart for this round.
    pub published_tables: bool,
    pub summary: Vec<ColumnSummary>,
    pub unit_root: Vec<Stationarity>,
    pub regressions: Vec<RegressionReport>,
    pub correlation: Option<CorrelationMatrix>,
    pub var: Option<VarReport>,
    /// Cholesky ordering used for the impulse responses.
    pub ordering: Vec<String>,
    pub impulse_responses: Vec<IrfResult>,
    pub lm_tests: Vec<LmTestRow>,
    pub lag_order: Vec<LagOrderRow>,
    pub errors: Vec<StageError>,
}

impl RoundReport {
    pub fn is_complete(&self) -> bool {
        self.errors.is_empty()
    }

    /// Impulse response of `response` to `impulse`, matching names with or
    /// without a `D(...)` wrapper.
    pub fn irf(&self, impulse: &str, response: &str) -> Option<&IrfResult> {
        self.impulse_responses.iter().find(|r| {
            base_name(&r.impulse).eq_ignore_ascii_case(impulse) && base_name(&r.response).eq_ignore_ascii_case(response)
        })
    }
}

/// `X` for both `X` and `D(X)`.
pub fn base_name(name: &str) -> &str {
    name.strip_prefix("D(")
        .and_then(|n| n.strip_suffix(')'))
        .unwrap_or(name)
}

/// Every floating-point value is finite (absent optionals are fine).
pub trait AllFinite {
    fn all_finite(&self) -> bool;
}

fn finite(values: &[f64]) -> bool {
    values.iter().all(|v| v.is_finite())
}

impl AllFinite for OlsFit {
    fn all_finite(&self) -> bool {
        self.coefficients
            .iter()
            .all(|c| finite(&[c.estimate, c.std_error, c.t_stat, c.p_value]))
            && finite(&[
                self.r_squared,
                self.adj_r_squared,
                self.se_of_regression,
                self.sum_squared_resid,
                self.log_likelihood,
                self.aic,
                self.sc,
                self.hq,
                self.durbin_watson,
                self.mean_dependent,
                self.sd_dependent,
            ])
            && self.f_statistic.map_or(true, f64::is_finite)
            && self.prob_f.map_or(true, f64::is_finite)
            && finite(&self.residuals)
            && finite(&self.fitted)
    }
}

impl AllFinite for AdfResult {
    fn all_finite(&self) -> bool {
        finite(&[
            self.statistic,
            self.p_value,
            self.critical_values.one,
            self.critical_values.five,
            self.critical_values.ten,
        ]) && finite(&self.lag_search)
            && self.regression.all_finite()
    }
}

impl AllFinite for Stationarity {
    fn all_finite(&self) -> bool {
        self.level.all_finite() && self.difference.as_ref().map_or(true, AllFinite::all_finite)
    }
}

impl AllFinite for VarFit {
    fn all_finite(&self) -> bool {
        self.equations.iter().all(AllFinite::all_finite)
            && self.sigma_u.iter().all(|r| finite(r))
            && self.sigma_a.iter().all(|r| finite(r))
            && finite(&[
                self.det_sigma_u,
                self.det_sigma_a,
                self.log_likelihood,
                self.aic,
                self.sc,
            ])
    }
}

impl AllFinite for IrfResult {
    fn all_finite(&self) -> bool {
        finite(&self.values) && self.threshold.is_finite() && self.return_horizon.map_or(true, f64::is_finite)
    }
}

impl AllFinite for LmTestRow {
    fn all_finite(&self) -> bool {
        finite(&[self.lre_stat, self.p_value, self.rao_f, self.rao_df.1, self.rao_p_value])
    }
}

impl AllFinite for LagOrderRow {
    fn all_finite(&self) -> bool {
        finite(&[self.log_likelihood, self.fpe, self.aic, self.sc, self.hq]) && self.lr.map_or(true, f64::is_finite)
    }
}

impl AllFinite for RoundReport {
    fn all_finite(&self) -> bool {
        self.summary.iter().all(|s| finite(&[s.mean, s.sd]))
            && self.unit_root.iter().all(AllFinite::all_finite)
            && self.regressions.iter().all(|r| finite(&r.actual) && r.fit.all_finite())
            && self
                .correlation
                .as_ref()
                .map_or(true, |c| c.values.iter().all(|r| finite(r)))
            && self
                .var
                .as_ref()
                .map_or(true, |v| finite(&v.companion_moduli) && v.fit.all_finite())
            && self.impulse_responses.iter().all(AllFinite::all_finite)
            && self.lm_tests.iter().all(AllFinite::all_finite)
            && self.lag_order.iter().all(AllFinite::all_finite)
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Mean and sample standard deviation of each level growth column.
pub fn summary_statistics(frame: &StudyFrame) -> Vec<ColumnSummary> {
    frame.columns().iter().map(|s| column_summary(s)).collect()
}

pub fn column_summary(series: &DatedSeries) -> ColumnSummary {
    let v = series.values();
    let m = mean(v);
    let sd = if v.len() > 1 {
        (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
    } else {
        0.0
    };
    ColumnSummary {
        variable: series.name().to_string(),
        n: v.len(),
        mean: m,
        sd,
    }
}

/// Pearson correlation of two equal-length samples.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::Domain(
            "correlation needs two samples of equal length >= 2".into(),
        ));
    }
    let (mx, my) = (mean(x), mean(y));
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Degenerate("correlation with a constant column".into()));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Pairwise correlations of the level growth columns.
pub fn correlation_matrix(frame: &StudyFrame) -> Result<CorrelationMatrix> {
    let cols = frame.columns();
    for c in cols {
        if c.values().iter().all(|v| *v == c.values()[0]) {
            return Err(Error::Degenerate(format!("column `{}` is constant", c.name())));
        }
    }
    let k = cols.len();
    let mut values = vec![vec![1.0; k]; k];
    for i in 0..k {
        for j in (i + 1)..k {
            let r = pearson(cols[i].values(), cols[j].values())?;
            values[i][j] = r;
            values[j][i] = r;
        }
    }
    Ok(CorrelationMatrix {
        variables: cols.iter().map(|c| c.name().to_string()).collect(),
        values,
    })
}

fn regression(frame: &StudyFrame, response: &str, regressors: &[String]) -> Result<RegressionReport> {
    let col = |name: &str| {
        frame
            .column(name)
            .ok_or_else(|| Error::Config(format!("unknown variable `{name}`")))
    };
    let y = col(response)?;
    let mut design = Design::new().constant(y.len());
    let mut names = Vec::with_capacity(regressors.len());
    for r in regressors {
        let s = col(r)?;
        design.push(s.name(), s.values().to_vec());
        names.push(s.name().to_string());
    }
    let fit = fit_design(y.values(), &design)?;
    Ok(RegressionReport {
        response: y.name().to_string(),
        regressors: names,
        dates: y.dates().to_vec(),
        actual: y.values().to_vec(),
        fit,
    })
}

/// Ledger that collects late-stage failures.
struct Ledger(Vec<StageError>);

impl Ledger {
    fn keep<T: AllFinite>(&mut self, stage: Stage, what: &str, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) if v.all_finite() => Some(v),
            Ok(_) => {
                self.0.push(StageError {
                    stage,
                    message: format!("{what}: non-finite result"),
                });
                None
            }
            Err(e) => {
                self.0.push(StageError {
                    stage,
                    message: format!("{what}: {e}"),
                });
                None
            }
        }
    }
}

impl AllFinite for RegressionReport {
    fn all_finite(&self) -> bool {
        finite(&self.actual) && self.fit.all_finite()
    }
}

impl AllFinite for CorrelationMatrix {
    fn all_finite(&self) -> bool {
        self.values.iter().all(|r| finite(r))
    }
}

impl AllFinite for VarReport {
    fn all_finite(&self) -> bool {
        finite(&self.companion_moduli) && self.fit.all_finite()
    }
}

impl<T: AllFinite> AllFinite for Vec<T> {
    fn all_finite(&self) -> bool {
        self.iter().all(AllFinite::all_finite)
    }
}

/// Raw input levels for the study.
#[derive(Debug, Clone)]
pub struct StudyData {
    pub cases: DatedSeries,
    pub index: DatedSeries,
    pub fx: DatedSeries,
}

/// Runs one round end to end.
///
/// Building the frame (alignment, growth rates, unit-root tests) must
/// succeed; failures after that are recorded in the report's `errors` and
/// the affected sections are left empty.
pub fn run_round(id: RoundId, data: &StudyData, config: &StudyConfig) -> Result<RoundReport> {
    config.validate()?;
    let window = id.window();
    let round = config.round(id);
    let frame = build_frame(&window, &data.cases, &data.index, &data.fx, &config.column_policies(id))?;
    if !frame.stationarity.iter().all(AllFinite::all_finite) {
        return Err(Error::Degenerate(format!(
            "round {id}: unit-root regressions are not finite"
        )));
    }
    let mut ledger = Ledger(Vec::new());

    let regressions = config
        .regressions(id)
        .iter()
        .filter_map(|(resp, regs)| {
            ledger.keep(
                Stage::Regression,
                &format!("{resp} on {}", regs.join(", ")),
                regression(&frame, resp, regs),
            )
        })
        .collect();

    let correlation = ledger.keep(Stage::Correlation, "correlation matrix", correlation_matrix(&frame));

    let names = frame.model_names();
    let var = ledger.keep(
        Stage::Var,
        &format!("VAR({})", round.var_lags),
        fit_var(&names, &frame.model_values(), round.var_lags).map(|fit| {
            let moduli = companion_eigenvalues(&fit);
            VarReport {
                dates: frame.model[0].dates()[fit.lags..].to_vec(),
                stable: moduli.first().map_or(true, |m| *m < 1.0),
                companion_moduli: moduli,
                fit,
            }
        }),
    );

    // translate the configured ordering onto the model column names
    let ordering: Vec<String> = canonical_ordering(&config.defaults.ordering)?
        .iter()
        .map(|v| {
            names
                .iter()
                .find(|n| base_name(n) == *v)
                .cloned()
                .unwrap_or_else(|| v.to_string())
        })
        .collect();

    let mut impulse_responses = Vec::new();
    let mut lm_tests = Vec::new();
    if let Some(v) = &var {
        let irf = cholesky_irf(&v.fit, config.defaults.horizons, &ordering).and_then(|rs| {
            rs.into_iter()
                .map(|r| r.with_threshold(config.defaults.threshold))
                .collect::<Result<Vec<_>>>()
        });
        impulse_responses = ledger
            .keep(Stage::ImpulseResponse, "Cholesky impulse responses", irf)
            .unwrap_or_default();
        if round.lm_tests {
            for mode in [LmMode::AtLag, LmMode::UpToLag] {
                for h in 1..=config.defaults.lm_max_lag {
                    if let Some(row) = ledger.keep(
                        Stage::LmTest,
                        &format!("LM test {mode:?} {h}"),
                        lm_serial_test(&v.fit, h, mode),
                    ) {
                        lm_tests.push(row);
                    }
                }
            }
        }
    }

    let lag_order = if round.lag_order {
        ledger
            .keep(
                Stage::LagOrder,
                "lag order selection",
                lag_order_table(&names, &frame.model_values(), config.defaults.lag_order_max_lag),
            )
            .unwrap_or_default()
    } else {
        Vec::new()
    };

    Ok(RoundReport {
        schema_version: SCHEMA_VERSION,
        round: id,
        window,
        published_tables: round.published_tables,
        summary: summary_statistics(&frame),
        unit_root: frame.stationarity.clone(),
        regressions,
        correlation,
        var,
        ordering,
        impulse_responses,
        lm_tests,
        lag_order,
        errors: ledger.0,
    })
}

/// Runs `rounds` concurrently; results come back in the order requested.
pub fn run_rounds(rounds: &[RoundId], data: &StudyData, config: &StudyConfig) -> Vec<(RoundId, Result<RoundReport>)> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = rounds
            .iter()
            .map(|&id| (id, scope.spawn(move || run_round(id, data, config))))
            .collect();
        handles
            .into_iter()
            .map(|(id, h)| (id, h.join().expect("round worker panicked")))
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::demo_dataset;

    fn data() -> StudyData {
        let d = demo_dataset(
            2020,
            NaiveDate::from_ymd_opt(2020, 3, 1).unwrap(),
            NaiveDate::from_ymd_opt(2020, 7, 1).unwrap(),
        );
        StudyData {
            cases: d.cases,
            index: d.sensex,
            fx: d.fx,
        }
    }

    fn daily(name: &str, v: &[f64]) -> DatedSeries {
        DatedSeries::daily(name, NaiveDate::from_ymd_opt(2020, 1, 1).unwrap(), v.to_vec()).unwrap()
    }

    #[test]
    fn pearson_examples() {
        assert!((pearson(&[1.0, 2.0, 3.0], &[1.0, 3.0, 2.0]).unwrap() - 0.5).abs() < 1e-15);
        assert!((pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-15);
        assert!(pearson(&[1.0, 1.0, 1.0], &[3.0, 2.0, 1.0]).is_err());
    }

    #[test]
    fn summary_examples() {
        let s = column_summary(&daily("x", &[0.1, 0.2, 0.3]));
        assert!((s.mean - 0.2).abs() < 1e-15 && (s.sd - 0.1).abs() < 1e-15);
        assert_eq!(column_summary(&daily("c", &[4.0; 5])).sd, 0.0);
    }

    #[test]
    fn coefficient_counts_match_round_lags() {
        let d = data();
        let cfg = StudyConfig::default();
        let a = run_round(RoundId::A, &d, &cfg).unwrap();
        assert_eq!(a.var.as_ref().unwrap().fit.n_coefficients, 12);
        let h = run_round(RoundId::H, &d, &cfg).unwrap();
        assert_eq!(h.var.as_ref().unwrap().fit.n_coefficients, 39);
        assert_eq!(h.lm_tests.len(), 12);
        assert!(a.lm_tests.is_empty() && a.lag_order.is_empty());
    }

    #[test]
    fn every_round_runs_and_is_finite() {
        let d = data();
        let cfg = StudyConfig::default();
        for (id, r) in run_rounds(&RoundId::ALL, &d, &cfg) {
            let r = r.unwrap();
            assert_eq!(r.round, id);
            assert!(r.errors.is_empty(), "round {id}: {:?}", r.errors);
            assert!(r.all_finite(), "round {id}");
            let c = r.correlation.as_ref().unwrap();
            for i in 0..3 {
                assert_eq!(c.values[i][i], 1.0);
                for j in 0..3 {
                    assert_eq!(c.values[i][j], c.values[j][i]);
                    assert!(c.values[i][j].abs() <= 1.0);
                }
            }
            assert_eq!(r.impulse_responses.len(), 9);
        }
    }

    #[test]
    fn section_layout_per_round() {
        let d = data();
        let cfg = StudyConfig::default();
        let e = run_round(RoundId::E, &d, &cfg).unwrap();
        assert_eq!(e.regressions.len(), 1);
        assert_eq!(e.regressions[0].response, "GSENSEX");
        let g = run_round(RoundId::G, &d, &cfg).unwrap();
        assert!(g.regressions.is_empty() && !g.published_tables);
        let f = run_round(RoundId::F, &d, &cfg).unwrap();
        assert_eq!(f.lag_order.len(), 9);
        assert_eq!(f.lm_tests.len(), 12);
    }

    #[test]
    fn correlation_is_affine_invariant() {
        let d = data();
        let cfg = StudyConfig::default();
        let w = RoundId::B.window();
        let pol = cfg.column_policies(RoundId::B);
        let f = build_frame(&w, &d.cases, &d.index, &d.fx, &pol).unwrap();
        let mut g = f.clone();
        g.gex = DatedSeries::new(
            "GEX",
            f.gex.dates().to_vec(),
            f.gex.values().iter().map(|v| 7.0 * v - 3.0).collect(),
        )
        .unwrap();
        let (a, b) = (correlation_matrix(&f).unwrap(), correlation_matrix(&g).unwrap());
        for i in 0..3 {
            for j in 0..3 {
                assert!((a.values[i][j] - b.values[i][j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn missing_coverage_is_an_error() {
        let mut d = data();
        d.fx = d.fx.slice(
            NaiveDate::from_ymd_opt(2020, 4, 1).unwrap(),
            NaiveDate::from_ymd_opt(2020, 7, 1).unwrap(),
        );
        let err = run_round(RoundId::A, &d, &StudyConfig::default()).unwrap_err();
        assert!(err.is_input_error());
    }
}
