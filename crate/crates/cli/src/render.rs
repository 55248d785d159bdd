//! Plain-text tables laid out like the usual regression printouts.
//!
//! Formatting uses Rust's own float formatting, so output does not depend on
//! the process locale.

use std::fmt::Write;

use econokit_core::study::{RegressionReport, RoundReport};
use econokit_core::unitroot::{AdfResult, Level};
use econokit_core::var::{IrfResult, LagOrderRow, LmMode, LmTestRow};
use econokit_core::OlsFit;

/// Fixed decimals, or scientific notation for tiny non-zero magnitudes.
pub fn num(x: f64, precision: usize) -> String {
    if x == 0.0 {
        return format!("{:.*}", precision, 0.0);
    }
    if x.abs() < 1e-4 {
        return format!("{:.*E}", precision.min(2), x);
    }
    format!("{x:.precision$}")
}

fn opt(x: Option<f64>, precision: usize) -> String {
    x.map_or_else(|| "NA".to_string(), |v| num(v, precision))
}

/// Left-aligned first column, right-aligned others, widths fitted to content.
pub struct Table {
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            rows: vec![header.iter().map(|s| s.to_string()).collect()],
        }
    }

    pub fn row(&mut self, cells: Vec<String>) -> &mut Self {
        self.rows.push(cells);
        self
    }

    pub fn render(&self) -> String {
        let cols = self.rows.iter().map(Vec::len).max().unwrap_or(0);
        let widths: Vec<usize> = (0..cols)
            .map(|c| {
                self.rows
                    .iter()
                    .filter_map(|r| r.get(c))
                    .map(|s| s.chars().count())
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let mut out = String::new();
        for (i, row) in self.rows.iter().enumerate() {
            let mut line = String::new();
            for (c, cell) in row.iter().enumerate() {
                if c == 0 {
                    let _ = write!(line, "{cell:<w$}", w = widths[0]);
                } else {
                    let _ = write!(line, "  {cell:>w$}", w = widths[c]);
                }
            }
            out.push_str(line.trim_end());
            out.push('\n');
            if i == 0 {
                let total = widths.iter().sum::<usize>() + 2 * cols.saturating_sub(1);
                out.push_str(&"-".repeat(total));
                out.push('\n');
            }
        }
        out
    }
}

/// Coefficient table plus the two-column summary block.
pub fn ols(fit: &OlsFit, precision: usize) -> String {
    let p = precision;
    let mut t = Table::new(&["Variable", "Coefficient", "Std. Error", "t-Statistic", "Prob."]);
    for c in &fit.coefficients {
        t.row(vec![
            c.name.clone(),
            num(c.estimate, p),
            num(c.std_error, p),
            num(c.t_stat, p),
            format!("{:.4}", c.p_value),
        ]);
    }
    let mut s = Table::new(&["", "", "", ""]);
    s.row(vec![
        "R-squared".into(),
        num(fit.r_squared, p),
        "Mean dependent var".into(),
        num(fit.mean_dependent, p),
    ]);
    s.row(vec![
        "Adjusted R-squared".into(),
        num(fit.adj_r_squared, p),
        "S.D. dependent var".into(),
        num(fit.sd_dependent, p),
    ]);
    s.row(vec![
        "S.E. of regression".into(),
        num(fit.se_of_regression, p),
        "Akaike info criterion".into(),
        num(fit.aic, p),
    ]);
    s.row(vec![
        "Sum squared resid".into(),
        num(fit.sum_squared_resid, p),
        "Schwarz criterion".into(),
        num(fit.sc, p),
    ]);
    s.row(vec![
        "Log likelihood".into(),
        num(fit.log_likelihood, p),
        "Hannan-Quinn criter.".into(),
        num(fit.hq, p),
    ]);
    s.row(vec![
        "F-statistic".into(),
        opt(fit.f_statistic, p),
        "Durbin-Watson stat".into(),
        num(fit.durbin_watson, p),
    ]);
    s.row(vec![
        "Prob(F-statistic)".into(),
        opt(fit.prob_f, p),
        String::new(),
        String::new(),
    ]);
    let summary = s.render();
    // drop the blank header line and rule
    let summary: String = summary.lines().skip(2).map(|l| format!("{l}\n")).collect();
    format!("{}\n{}", t.render(), summary)
}

fn dependent_of(tested: &str) -> String {
    match tested.strip_prefix("D(").and_then(|v| v.strip_suffix(')')) {
        Some(inner) => format!("D({inner},2)"),
        None => format!("D({tested})"),
    }
}

/// Unit-root test: statistic and critical values, then the test equation.
pub fn adf(r: &AdfResult, precision: usize) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "Null Hypothesis: {} has a unit root", r.tested);
    let _ = writeln!(out, "Exogenous: {}", r.deterministic.label());
    match r.maxlag {
        Some(m) => {
            let _ = writeln!(out, "Lag Length: {} (Automatic - based on SIC, maxlag={m})", r.lag);
        }
        None => {
            let _ = writeln!(out, "Lag Length: {} (Fixed)", r.lag);
        }
    }
    out.push('\n');
    let mut t = Table::new(&["", "t-Statistic", "Prob.*"]);
    t.row(vec![
        "Augmented Dickey-Fuller test statistic".into(),
        num(r.statistic, precision),
        format!("{:.4}", r.p_value),
    ]);
    for level in Level::ALL {
        let label = format!(
            "Test critical values: {:>3}% level",
            (level.probability() * 100.0).round()
        );
        t.row(vec![label, num(r.critical_values.get(level), precision), String::new()]);
    }
    out.push_str(&t.render());
    out.push_str("*MacKinnon one-sided p-values.\n\n");
    let _ = writeln!(out, "Augmented Dickey-Fuller Test Equation");
    let _ = writeln!(out, "Dependent Variable: {}", dependent_of(&r.tested));
    let _ = writeln!(out, "Method: Least Squares");
    let _ = writeln!(out, "Sample (adjusted): {} {}", r.sample_start, r.sample_end);
    let _ = writeln!(out, "Included observations: {} after adjustments\n", r.n_obs);
    out.push_str(&ols(&r.regression, precision));
    out
}

fn regression(r: &RegressionReport, precision: usize) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "Dependent Variable: {}", r.response);
    let _ = writeln!(out, "Method: Least Squares");
    if let (Some(first), Some(last)) = (r.dates.first(), r.dates.last()) {
        let _ = writeln!(out, "Sample: {first} {last}");
    }
    let _ = writeln!(out, "Included observations: {}\n", r.fit.n_obs);
    out.push_str(&ols(&r.fit, precision));
    out
}

pub fn irf(r: &IrfResult, precision: usize) -> String {
    let mut t = Table::new(&["Horizon", "Response"]);
    for (h, v) in r.values.iter().enumerate() {
        t.row(vec![h.to_string(), num(*v, precision)]);
    }
    let mut out = format!(
        "Response of {} to Cholesky one S.D. {} innovation\n\n",
        r.response, r.impulse
    );
    out.push_str(&t.render());
    let _ = writeln!(
        out,
        "Return horizon ({}% band): {}",
        r.threshold * 100.0,
        opt(r.return_horizon, 2)
    );
    out
}

fn lm(rows: &[LmTestRow], mode: LmMode, precision: usize) -> String {
    let title = match mode {
        LmMode::AtLag => "Null hypothesis: No serial correlation at lag h",
        LmMode::UpToLag => "Null hypothesis: No serial correlation at lags 1 to h",
    };
    let mut t = Table::new(&["Lag", "LRE* stat", "df", "Prob.", "Rao F-stat", "df", "Prob."]);
    for r in rows.iter().filter(|r| r.mode == mode) {
        t.row(vec![
            r.lag.to_string(),
            num(r.lre_stat, precision),
            r.df.to_string(),
            format!("{:.4}", r.p_value),
            num(r.rao_f, precision),
            format!("({}, {:.1})", r.rao_df.0, r.rao_df.1),
            format!("{:.4}", r.rao_p_value),
        ]);
    }
    format!("{title}\n\n{}", t.render())
}

fn lag_order(rows: &[LagOrderRow], precision: usize) -> String {
    let star = |v: String, s: bool| if s { format!("{v}*") } else { v };
    let mut t = Table::new(&["Lag", "LogL", "LR", "FPE", "AIC", "SC", "HQ"]);
    for r in rows {
        t.row(vec![
            r.lag.to_string(),
            num(r.log_likelihood, precision),
            star(opt(r.lr, precision), r.selected.lr),
            star(num(r.fpe, precision), r.selected.fpe),
            star(num(r.aic, precision), r.selected.aic),
            star(num(r.sc, precision), r.selected.sc),
            star(num(r.hq, precision), r.selected.hq),
        ]);
    }
    format!("{}* indicates lag order selected by the criterion\n", t.render())
}

fn heading(out: &mut String, title: &str) {
    let _ = writeln!(out, "\n{title}\n{}\n", "=".repeat(title.chars().count()));
}

/// Full human-readable report for one round.
pub fn report(r: &RoundReport, precision: usize) -> String {
    let p = precision;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "Round {}: {} ({} to {}, {} days)",
        r.round,
        r.window.label,
        r.window.start,
        r.window.end,
        r.window.days()
    );
    let note = if r.published_tables {
        ""
    } else {
        " [no published counterpart]"
    };

    heading(&mut out, "Summary statistics");
    let mut t = Table::new(&["Variable", "N", "Mean", "SD"]);
    for s in &r.summary {
        t.row(vec![s.variable.clone(), s.n.to_string(), num(s.mean, p), num(s.sd, p)]);
    }
    out.push_str(&t.render());

    heading(&mut out, &format!("Unit-root tests{note}"));
    for s in &r.unit_root {
        out.push_str(&adf(&s.level, p));
        if let Some(d) = &s.difference {
            out.push('\n');
            out.push_str(&adf(d, p));
        }
        let _ = writeln!(
            out,
            "\n{} enters the VAR {}\n",
            s.variable,
            if s.differenced {
                "in first differences"
            } else {
                "in levels"
            }
        );
    }

    if !r.regressions.is_empty() {
        heading(&mut out, &format!("Regressions{note}"));
        for reg in &r.regressions {
            out.push_str(&regression(reg, p));
            out.push('\n');
        }
    }

    if let Some(c) = &r.correlation {
        heading(&mut out, "Correlation matrix");
        let mut header = vec![""];
        header.extend(c.variables.iter().map(String::as_str));
        let mut t = Table::new(&header);
        for (name, row) in c.variables.iter().zip(&c.values) {
            let mut cells = vec![name.clone()];
            cells.extend(row.iter().map(|v| num(*v, p)));
            t.row(cells);
        }
        out.push_str(&t.render());
    }

    if let Some(v) = &r.var {
        let fit = &v.fit;
        heading(&mut out, "Vector autoregression");
        if let (Some(first), Some(last)) = (v.dates.first(), v.dates.last()) {
            let _ = writeln!(out, "Sample (adjusted): {first} {last}");
        }
        let _ = writeln!(out, "Included observations: {} after adjustments\n", fit.n_obs);
        let mut header = vec![""];
        header.extend(fit.variables.iter().map(String::as_str));
        let mut t = Table::new(&header);
        for (i, c) in fit.equations[0].coefficients.iter().enumerate() {
            let mut est = vec![c.name.clone()];
            let mut se = vec![String::new()];
            let mut ts = vec![String::new()];
            for eq in &fit.equations {
                let c = &eq.coefficients[i];
                est.push(num(c.estimate, p));
                se.push(format!("({})", num(c.std_error, p)));
                ts.push(format!("[{}]", num(c.t_stat, p)));
            }
            t.row(est).row(se).row(ts);
        }
        let stats: [(&str, fn(&OlsFit) -> f64); 9] = [
            ("R-squared", |f| f.r_squared),
            ("Adj. R-squared", |f| f.adj_r_squared),
            ("Sum sq. resids", |f| f.sum_squared_resid),
            ("S.E. equation", |f| f.se_of_regression),
            ("F-statistic", |f| f.f_statistic.unwrap_or(f64::NAN)),
            ("Log likelihood", |f| f.log_likelihood),
            ("Akaike AIC", |f| f.aic),
            ("Schwarz SC", |f| f.sc),
            ("Mean dependent", |f| f.mean_dependent),
        ];
        for (label, get) in stats {
            let mut row = vec![label.to_string()];
            row.extend(fit.equations.iter().map(|e| {
                let v = get(e);
                if v.is_finite() {
                    num(v, p)
                } else {
                    "NA".into()
                }
            }));
            t.row(row);
        }
        let mut sd = vec!["S.D. dependent".to_string()];
        sd.extend(fit.equations.iter().map(|e| num(e.sd_dependent, p)));
        t.row(sd);
        out.push_str(&t.render());
        let mut s = Table::new(&["", ""]);
        s.row(vec![
            "Determinant resid covariance (dof adj.)".into(),
            num(fit.det_sigma_a, p),
        ]);
        s.row(vec!["Determinant resid covariance".into(), num(fit.det_sigma_u, p)]);
        s.row(vec!["Log likelihood".into(), num(fit.log_likelihood, p)]);
        s.row(vec!["Akaike information criterion".into(), num(fit.aic, p)]);
        s.row(vec!["Schwarz criterion".into(), num(fit.sc, p)]);
        s.row(vec!["Number of coefficients".into(), fit.n_coefficients.to_string()]);
        s.row(vec![
            "Largest companion root modulus".into(),
            num(v.companion_moduli.first().copied().unwrap_or(0.0), p),
        ]);
        out.push('\n');
        out.extend(s.render().lines().skip(2).map(|l| format!("{l}\n")));
    }

    if !r.impulse_responses.is_empty() {
        heading(
            &mut out,
            &format!("Impulse responses (Cholesky ordering: {})", r.ordering.join(", ")),
        );
        for irf_row in &r.impulse_responses {
            out.push_str(&irf(irf_row, p));
            out.push('\n');
        }
    }

    if !r.lm_tests.is_empty() {
        heading(&mut out, "VAR residual serial correlation LM tests");
        out.push_str(&lm(&r.lm_tests, LmMode::AtLag, p));
        out.push('\n');
        out.push_str(&lm(&r.lm_tests, LmMode::UpToLag, p));
        out.push_str("*Edgeworth expansion corrected likelihood ratio statistic.\n");
    }

    if !r.lag_order.is_empty() {
        heading(&mut out, "VAR lag order selection criteria");
        out.push_str(&lag_order(&r.lag_order, p));
    }

    if !r.errors.is_empty() {
        heading(&mut out, "Errors");
        for e in &r.errors {
            let _ = writeln!(out, "{:?}: {}", e.stage, e.message);
        }
    }
    out
}
