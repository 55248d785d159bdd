//! Time-series econometrics engine: OLS with full diagnostics, augmented
//! Dickey-Fuller unit-root tests, VAR estimation, orthogonalized impulse
//! responses, residual serial-correlation tests and lag-order selection,
//! plus a study runner that applies them over fixed date windows.

pub mod dist;
pub mod error;
pub mod frame;
pub mod linalg;
pub mod linreg;
pub mod series;
pub mod simulate;
pub mod study;
pub mod unitroot;
pub mod var;
pub mod window;

pub use error::{Error, Result};
pub use frame::{build_frame, window_growth, ColumnPolicy, DiffPolicy, Stationarity, StudyFrame, VARIABLES};
pub use linreg::{adjusted_r_squared, fit_design, fit_ols, Coefficient, Design, OlsFit};
pub use series::{align_calendar, difference, growth_rate, load_series, DatedSeries};
pub use study::{run_round, run_rounds, RoundReport, StudyConfig, StudyData};
pub use unitroot::{adf_test, auto_maxlag, AdfResult, AdfSpec, CriticalValues, Deterministic, Level};
pub use var::{cholesky_irf, fit_var, lag_order_table, lm_serial_test, return_horizon, IrfResult, VarFit};
pub use window::{round_windows, RoundId, StudyWindow};
