mod output;
mod render;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};

use econokit_core::simulate::demo_dataset;
use econokit_core::study::{canonical_variable, run_round, run_rounds, LagChoice, RoundReport, StudyConfig, StudyData};
use econokit_core::unitroot::{adf_test, AdfSpec, Deterministic, LagSelection, MaxLag};
use econokit_core::{load_series, window_growth, DatedSeries, RoundId};

use output::{write_atomic, Format};

/// Input files expected in the data directory, in column order.
const DATA_FILES: [&str; 3] = ["cases.csv", "sensex.csv", "fx.csv"];

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] econokit_core::Error),
    #[error("{0}")]
    Analysis(String),
    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: std::io::Error },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) if e.is_input_error() => 2,
            CliError::Core(_) | CliError::Analysis(_) | CliError::Write { .. } => 1,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(
    name = "econokit",
    version,
    about = "Unit-root, regression and VAR analysis over the study windows"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one round (a..h) or all of them and write the reports.
    Run(RunArgs),
    /// Augmented Dickey-Fuller test on one growth series over a date window.
    Adf(AdfArgs),
    /// Impulse response of one variable to another for a round.
    Irf(IrfArgs),
    /// Write a seeded synthetic dataset (cases.csv, sensex.csv, fx.csv).
    DemoData(DemoArgs),
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
    /// Decimal places in tables and CSV.
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u16).range(1..=17))]
    precision: u16,
}

#[derive(Args)]
struct ConfigArgs {
    /// Study config (TOML); keys not given fall back to the built-in defaults.
    #[arg(long, env = "ECONOKIT_CONFIG")]
    config: Option<PathBuf>,
    /// VAR lag order for the selected round(s).
    #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
    var_lags: Option<u16>,
    /// Cholesky ordering, comma separated (e.g. GROWTHC,GSENSEX,GEX).
    #[arg(long, value_delimiter = ',')]
    ordering: Option<Vec<String>>,
    /// Impulse-response horizons.
    #[arg(short = 'H', long, value_parser = clap::value_parser!(u16).range(1..))]
    horizons: Option<u16>,
    /// Return-to-trend band as a fraction of the peak response.
    #[arg(long, value_parser = parse_fraction)]
    threshold: Option<f64>,
    /// ADF lag length: `auto` or a number.
    #[arg(long)]
    lag: Option<LagChoice>,
    /// ADF maximum lag for automatic selection: `auto` or a number.
    #[arg(long)]
    maxlag: Option<LagChoice>,
    /// Report every regression permutation, including rounds that show fewer.
    #[arg(long)]
    all_regressions: bool,
}

#[derive(Args)]
struct RunArgs {
    /// Round letter or `all`.
    #[arg(long, default_value = "all")]
    round: String,
    #[arg(long, default_value = "data")]
    data: PathBuf,
    /// Output directory; reports go to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct AdfArgs {
    /// growthc, gsensex or gex.
    #[arg(long)]
    series: String,
    /// Date window `START:END` (ISO dates).
    #[arg(long, value_parser = parse_window, conflicts_with = "round", required_unless_present = "round")]
    window: Option<(NaiveDate, NaiveDate)>,
    /// Use a study round's window instead of --window.
    #[arg(long)]
    round: Option<RoundId>,
    /// Deterministic terms: none, const or trend.
    #[arg(long, default_value = "const")]
    det: Deterministic,
    #[arg(long, default_value = "auto")]
    lag: LagChoice,
    #[arg(long, default_value = "auto")]
    maxlag: LagChoice,
    /// Test the first difference of the growth series.
    #[arg(long)]
    difference: bool,
    #[arg(long, default_value = "data")]
    data: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct IrfArgs {
    #[arg(long)]
    round: RoundId,
    #[arg(long)]
    impulse: String,
    #[arg(long)]
    response: String,
    #[arg(long, default_value = "data")]
    data: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u16).range(1..=17))]
    precision: u16,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct DemoArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 2020)]
    seed: u64,
}

fn parse_window(s: &str) -> Result<(NaiveDate, NaiveDate), String> {
    let (a, b) = s.split_once(':').ok_or("expected START:END")?;
    let parse = |d: &str| NaiveDate::parse_from_str(d.trim(), "%Y-%m-%d").map_err(|e| format!("bad date `{d}`: {e}"));
    let (start, end) = (parse(a)?, parse(b)?);
    if end < start {
        return Err(format!("window end {end} precedes start {start}"));
    }
    Ok((start, end))
}

fn parse_fraction(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err("must lie strictly between 0 and 1".into())
    }
}

fn load_data(dir: &Path) -> CliResult<StudyData> {
    let missing: Vec<&str> = DATA_FILES.iter().copied().filter(|f| !dir.join(f).is_file()).collect();
    if !missing.is_empty() {
        return Err(CliError::Usage(format!(
            "missing input file(s) in {}: {}",
            dir.display(),
            missing.join(", ")
        )));
    }
    let load = |f: &str| load_series(dir.join(f), f.trim_end_matches(".csv"));
    Ok(StudyData {
        cases: load(DATA_FILES[0])?,
        index: load(DATA_FILES[1])?,
        fx: load(DATA_FILES[2])?,
    })
}

fn build_config(args: &ConfigArgs, rounds: &[RoundId]) -> CliResult<StudyConfig> {
    let mut cfg = match &args.config {
        Some(path) => StudyConfig::load(path)?,
        None => StudyConfig::default(),
    };
    if let Some(p) = args.var_lags {
        for &id in rounds {
            cfg.round_mut(id).var_lags = p as usize;
        }
    }
    if let Some(order) = &args.ordering {
        cfg.defaults.ordering = order.clone();
    }
    if let Some(h) = args.horizons {
        cfg.defaults.horizons = h as usize;
    }
    if let Some(t) = args.threshold {
        cfg.defaults.threshold = t;
    }
    if let Some(l) = args.lag {
        cfg.defaults.lag = l;
    }
    if let Some(m) = args.maxlag {
        cfg.defaults.maxlag = m;
    }
    if args.all_regressions {
        for &id in rounds {
            cfg.round_mut(id).regressions = None;
        }
    }
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(cfg)
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => write_atomic(path, text.as_bytes()).map_err(|source| CliError::Write {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn ledger_message(report: &RoundReport) -> String {
    let mut msg = format!("round {} finished with errors:", report.round);
    for e in &report.errors {
        let _ = write!(msg, "\n  {:?}: {}", e.stage, e.message);
    }
    msg
}

fn cmd_run(args: RunArgs) -> CliResult<u8> {
    let rounds: Vec<RoundId> = if args.round.eq_ignore_ascii_case("all") {
        RoundId::ALL.to_vec()
    } else {
        vec![args
            .round
            .parse()
            .map_err(|e: econokit_core::Error| CliError::Usage(e.to_string()))?]
    };
    let cfg = build_config(&args.config, &rounds)?;
    let data = load_data(&args.data)?;
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Write {
            path: dir.clone(),
            source,
        })?;
    }
    let (format, precision) = (args.output.format, args.output.precision as usize);
    let mut status = 0u8;
    for (id, result) in run_rounds(&rounds, &data, &cfg) {
        match result {
            Ok(report) => {
                let text = output::report_text(&report, format, precision);
                let path = args
                    .out
                    .as_ref()
                    .map(|d| d.join(format!("round_{id}.{}", format.extension())));
                emit(path.as_deref(), &text)?;
                if !report.errors.is_empty() {
                    eprintln!("{}", ledger_message(&report));
                    status = status.max(1);
                }
            }
            Err(e) => {
                let err = CliError::from(e);
                eprintln!("round {id}: {err}");
                status = status.max(err.exit_code());
            }
        }
    }
    Ok(status)
}

fn raw_for<'a>(data: &'a StudyData, variable: &str) -> &'a DatedSeries {
    match variable {
        "GROWTHC" => &data.cases,
        "GSENSEX" => &data.index,
        _ => &data.fx,
    }
}

fn cmd_adf(args: AdfArgs) -> CliResult<u8> {
    let variable = canonical_variable(&args.series).map_err(|e| CliError::Usage(e.to_string()))?;
    let (start, end) = match (args.window, args.round) {
        (Some(w), _) => w,
        (None, Some(r)) => {
            let w = r.window();
            (w.start, w.end)
        }
        (None, None) => return Err(CliError::Usage("give --window or --round".into())),
    };
    let data = load_data(&args.data)?;
    let growth = window_growth(raw_for(&data, variable), variable, start, end)?;
    let spec = AdfSpec {
        deterministic: args.det,
        lag: args.lag.fixed().map_or(LagSelection::Auto, LagSelection::Fixed),
        maxlag: args.maxlag.fixed().map_or(MaxLag::Auto, MaxLag::Fixed),
        difference: args.difference,
    };
    let result = adf_test(&growth, &spec)?;
    let p = args.output.precision as usize;
    let text = match args.output.format {
        Format::Table => render::adf(&result, p),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&result).expect("results serialize");
            s.push('\n');
            s
        }
        Format::Csv => format!(
            "series,deterministic,lag,n_obs,statistic,p_value,cv_1,cv_5,cv_10\n{},{},{},{},{:.p$},{:.p$},{:.p$},{:.p$},{:.p$}\n",
            result.tested,
            result.deterministic.key(),
            result.lag,
            result.n_obs,
            result.statistic,
            result.p_value,
            result.critical_values.one,
            result.critical_values.five,
            result.critical_values.ten,
        ),
    };
    emit(args.out.as_deref(), &text)?;
    Ok(0)
}

fn cmd_irf(args: IrfArgs) -> CliResult<u8> {
    let impulse = canonical_variable(&args.impulse).map_err(|e| CliError::Usage(e.to_string()))?;
    let response = canonical_variable(&args.response).map_err(|e| CliError::Usage(e.to_string()))?;
    let cfg = build_config(&args.config, &[args.round])?;
    let data = load_data(&args.data)?;
    let report = run_round(args.round, &data, &cfg)?;
    let Some(irf) = report.irf(impulse, response) else {
        return Err(CliError::Analysis(ledger_message(&report)));
    };
    let p = args.precision as usize;
    let text = match args.format {
        Format::Csv => output::irf_csv(irf, p),
        Format::Table => render::irf(irf, p),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(irf).expect("results serialize");
            s.push('\n');
            s
        }
    };
    emit(args.out.as_deref(), &text)?;
    Ok(0)
}

fn series_csv(s: &DatedSeries) -> String {
    let mut out = String::from("date,value\n");
    for (d, v) in s.dates().iter().zip(s.values()) {
        let _ = writeln!(out, "{d},{v}");
    }
    out
}

fn cmd_demo(args: DemoArgs) -> CliResult<u8> {
    let start = NaiveDate::from_ymd_opt(2020, 3, 1).expect("valid date");
    let end = NaiveDate::from_ymd_opt(2020, 7, 1).expect("valid date");
    let d = demo_dataset(args.seed, start, end);
    std::fs::create_dir_all(&args.out).map_err(|source| CliError::Write {
        path: args.out.clone(),
        source,
    })?;
    for (file, series) in DATA_FILES.iter().zip([&d.cases, &d.sensex, &d.fx]) {
        let path = args.out.join(file);
        emit(Some(&path), &series_csv(series))?;
    }
    eprintln!("wrote {} to {}", DATA_FILES.join(", "), args.out.display());
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Adf(a) => cmd_adf(a),
        Command::Irf(a) => cmd_irf(a),
        Command::DemoData(a) => cmd_demo(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
