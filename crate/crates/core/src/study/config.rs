use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{ColumnPolicy, DiffPolicy, VARIABLES};
use crate::unitroot::{Deterministic, LagSelection, MaxLag};
use crate::window::RoundId;

const EMBEDDED: &str = include_str!("default.toml");

/// `"auto"` or a fixed count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LagChoice {
    Fixed(usize),
    Auto(AutoWord),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoWord {
    Auto,
}

impl LagChoice {
    pub const AUTO: LagChoice = LagChoice::Auto(AutoWord::Auto);

    pub fn fixed(self) -> Option<usize> {
        match self {
            LagChoice::Fixed(n) => Some(n),
            LagChoice::Auto(_) => None,
        }
    }
}

impl std::str::FromStr for LagChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("auto") {
            return Ok(LagChoice::AUTO);
        }
        s.trim()
            .parse()
            .map(LagChoice::Fixed)
            .map_err(|_| Error::Config(format!("expected `auto` or a non-negative integer, got `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Defaults {
    pub ordering: Vec<String>,
    pub horizons: usize,
    pub threshold: f64,
    pub difference: DiffPolicy,
    pub lag: LagChoice,
    pub maxlag: LagChoice,
    pub lm_max_lag: usize,
    pub lag_order_max_lag: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoundConfig {
    /// ADF deterministic terms for each column, frame order.
    pub deterministic: [Deterministic; 3],
    pub var_lags: usize,
    /// Per-column override of the default differencing policy.
    #[serde(default)]
    pub difference: Option<[DiffPolicy; 3]>,
    /// `[response, regressor, ...]` lists; absent means every column on the
    /// other two.
    #[serde(default)]
    pub regressions: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub lm_tests: bool,
    #[serde(default)]
    pub lag_order: bool,
    /// False when the round's unit-root and regression tables have no
    /// published counterpart; they are still computed.
    #[serde(default = "yes")]
    pub published_tables: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub defaults: Defaults,
    pub rounds: BTreeMap<RoundId, RoundConfig>,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self::from_toml_str("").expect("embedded config is valid")
    }
}

fn merge(base: &mut toml::Table, over: toml::Table) {
    for (key, value) in over {
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
}

impl StudyConfig {
    /// Parses `text` layered over the embedded defaults.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let mut base: toml::Table = EMBEDDED
            .parse()
            .map_err(|e| Error::Config(format!("embedded config: {e}")))?;
        let user: toml::Table = text.parse().map_err(|e| Error::Config(format!("{e}")))?;
        merge(&mut base, user);
        let cfg: StudyConfig = toml::Value::Table(base)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn round(&self, id: RoundId) -> &RoundConfig {
        &self.rounds[&id]
    }

    pub fn round_mut(&mut self, id: RoundId) -> &mut RoundConfig {
        self.rounds.get_mut(&id).expect("validated config has every round")
    }

    /// Column policies for `id`, combining round and default settings.
    pub fn column_policies(&self, id: RoundId) -> [ColumnPolicy; 3] {
        let round = self.round(id);
        let diff = round.difference.unwrap_or([self.defaults.difference; 3]);
        let lag = match self.defaults.lag.fixed() {
            Some(p) => LagSelection::Fixed(p),
            None => LagSelection::Auto,
        };
        let maxlag = match self.defaults.maxlag.fixed() {
            Some(m) => MaxLag::Fixed(m),
            None => MaxLag::Auto,
        };
        std::array::from_fn(|i| ColumnPolicy {
            deterministic: round.deterministic[i],
            difference: diff[i],
            lag,
            maxlag,
        })
    }

    /// Regression specs for `id` as `(response, regressors)`.
    pub fn regressions(&self, id: RoundId) -> Vec<(String, Vec<String>)> {
        match &self.round(id).regressions {
            Some(list) => list.iter().map(|r| (r[0].clone(), r[1..].to_vec())).collect(),
            None => all_regressions(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let d = &self.defaults;
        if !(d.threshold > 0.0 && d.threshold < 1.0) {
            return Err(Error::Config(format!("threshold {} must lie in (0, 1)", d.threshold)));
        }
        if d.horizons == 0 {
            return Err(Error::Config("horizons must be at least 1".into()));
        }
        canonical_ordering(&d.ordering)?;
        for id in RoundId::ALL {
            let r = self
                .rounds
                .get(&id)
                .ok_or_else(|| Error::Config(format!("round {id} is not configured")))?;
            if r.var_lags == 0 {
                return Err(Error::Config(format!("round {id}: var_lags must be at least 1")));
            }
            for spec in r.regressions.iter().flatten() {
                if spec.len() < 2 {
                    return Err(Error::Config(format!(
                        "round {id}: regression needs a response and a regressor"
                    )));
                }
                for name in spec {
                    canonical_variable(name)?;
                }
            }
        }
        Ok(())
    }
}

/// Every column regressed on the other two, in frame order.
pub fn all_regressions() -> Vec<(String, Vec<String>)> {
    VARIABLES
        .iter()
        .map(|resp| {
            let others = VARIABLES.iter().filter(|v| *v != resp).map(|v| v.to_string()).collect();
            (resp.to_string(), others)
        })
        .collect()
}

/// Canonical upper-case column name, or a config error listing the valid ones.
pub fn canonical_variable(name: &str) -> Result<&'static str> {
    VARIABLES
        .iter()
        .copied()
        .find(|v| v.eq_ignore_ascii_case(name.trim()))
        .ok_or_else(|| {
            Error::Config(format!(
                "unknown variable `{name}`; valid names: {}",
                VARIABLES.join(", ")
            ))
        })
}

/// Validates that `ordering` is a permutation of the frame columns.
pub fn canonical_ordering(ordering: &[String]) -> Result<Vec<&'static str>> {
    let names = ordering
        .iter()
        .map(|n| canonical_variable(n))
        .collect::<Result<Vec<_>>>()?;
    let mut sorted = names.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != VARIABLES.len() || names.len() != VARIABLES.len() {
        return Err(Error::Config(format!(
            "ordering must list each of {} once",
            VARIABLES.join(", ")
        )));
    }
    Ok(names)
}
