//! Flat `key = value` experiment configuration.
//!
//! One assignment per line, `#` starts a comment, lists are comma
//! separated. Keys mirror the [`ScenarioConfig`] fields, plus a few sweep
//! controls:
//!
//! ```text
//! # SISO sweep, reflective layout
//! n_ris       = 4, 8, 16
//! group_size  = all          # every divisor of n_ris; also `full`
//! fading      = rayleigh, rician
//! k_factor_db = 3
//! trials      = 1000
//! seed        = 7
//! ```

use std::str::FromStr;

use crate::channel::{db_to_linear, Mode, ScenarioConfig};
use crate::design::DesignerRegistry;
use crate::{Error, Result};

/// Small-scale fading model of a sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Fading {
    Rayleigh,
    Rician,
}

impl Fading {
    pub fn as_str(self) -> &'static str {
        match self {
            Fading::Rayleigh => "rayleigh",
            Fading::Rician => "rician",
        }
    }
}

impl FromStr for Fading {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "rayleigh" => Ok(Fading::Rayleigh),
            "rician" => Ok(Fading::Rician),
            other => Err(format!("unknown fading `{other}`")),
        }
    }
}

/// One entry of the `group_size` list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupChoice {
    Size(usize),
    /// `N_G = N_I`.
    Full,
    /// Every divisor of `N_I`.
    AllDivisors,
}

/// Everything an experiment needs.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Geometry, path loss, power, mode, direct link, trials and seed.
    /// Per-point fields (`n_ris`, `n_tx`, `n_rx`, `n_users`, fading) are
    /// overwritten by the sweep.
    pub base: ScenarioConfig,
    pub n_ris: Vec<usize>,
    /// `(n_tx, n_rx)` pairs.
    pub antennas: Vec<(usize, usize)>,
    pub n_users: Vec<usize>,
    pub group_size: Vec<GroupChoice>,
    /// Explicit designer names; overrides `group_size` when present.
    pub architectures: Vec<String>,
    pub fading: Vec<Fading>,
    pub k_factor_db: f64,
    pub epsilon: f64,
    pub max_iters: usize,
    /// Random instances per size for the brute-force oracle.
    pub oracle_instances: usize,
    /// Sizes checked against the oracle.
    pub oracle_sizes: Vec<usize>,
    /// Record wall-clock time; off gives byte-identical output across runs.
    pub timing: bool,
    /// Largest `N_I` timed for a dense (single group) designer.
    pub bench_max_dense: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            base: ScenarioConfig::default(),
            n_ris: vec![16],
            antennas: vec![(1, 1)],
            n_users: vec![1],
            group_size: vec![GroupChoice::AllDivisors],
            architectures: Vec::new(),
            fading: vec![Fading::Rayleigh],
            k_factor_db: 3.0,
            epsilon: 1e-6,
            max_iters: 100,
            oracle_instances: 50,
            oracle_sizes: vec![2, 3],
            timing: true,
            bench_max_dense: 512,
        }
    }
}

impl ExperimentConfig {
    /// Scenario for one sweep point.
    pub fn scenario(&self, n_ris: usize, (n_tx, n_rx): (usize, usize), n_users: usize, fading: Fading) -> ScenarioConfig {
        ScenarioConfig {
            n_ris,
            n_tx,
            n_rx,
            n_users,
            group_size: 1,
            rician_factor: match fading {
                Fading::Rayleigh => 0.0,
                Fading::Rician => db_to_linear(self.k_factor_db),
            },
            ..self.base.clone()
        }
    }

    /// Designer names for a surface of `n_ris` elements, deduplicated in
    /// order. Group sizes that do not divide `n_ris` are skipped.
    pub fn designer_specs(&self, n_ris: usize) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        let mut push = |s: String| {
            if !out.contains(&s) {
                out.push(s);
            }
        };
        if !self.architectures.is_empty() {
            for a in &self.architectures {
                push(a.clone());
            }
            return out;
        }
        for g in &self.group_size {
            match *g {
                GroupChoice::Size(s) if s > 0 && n_ris % s == 0 => push(spec_for_group_size(s, n_ris)),
                GroupChoice::Size(_) => {}
                GroupChoice::Full => push(spec_for_group_size(n_ris, n_ris)),
                GroupChoice::AllDivisors => {
                    for s in (1..=n_ris).filter(|s| n_ris % s == 0) {
                        push(spec_for_group_size(s, n_ris));
                    }
                }
            }
        }
        out
    }

    /// Checks everything that can be checked without running.
    pub fn validate(&self) -> Result<()> {
        let nonempty = [
            ("n_ris", self.n_ris.is_empty()),
            ("n_tx", self.antennas.is_empty()),
            ("n_users", self.n_users.is_empty()),
            ("fading", self.fading.is_empty()),
        ];
        for (key, empty) in nonempty {
            if empty {
                return Err(Error::config(key, "list must not be empty"));
            }
        }
        if self.group_size.is_empty() && self.architectures.is_empty() {
            return Err(Error::config("group_size", "list must not be empty"));
        }
        if self.base.trials == 0 {
            return Err(Error::config("trials", "must be at least 1"));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::config("epsilon", "must be positive"));
        }
        if self.max_iters == 0 {
            return Err(Error::config("max_iters", "must be at least 1"));
        }
        let registry = DesignerRegistry::default();
        for a in &self.architectures {
            registry
                .create(a)
                .map_err(|e| Error::config("architectures", e.to_string()))?;
        }
        for &n in &self.n_ris {
            for &(n_tx, n_rx) in &self.antennas {
                for &k in &self.n_users {
                    let sc = ScenarioConfig {
                        n_ris: n,
                        n_tx,
                        n_rx,
                        n_users: k,
                        group_size: 1,
                        ..self.base.clone()
                    };
                    sc.validate()?;
                }
            }
        }
        Ok(())
    }
}

/// Registry name of the designer with `group_size` on `n_ris` elements.
pub fn spec_for_group_size(group_size: usize, n_ris: usize) -> String {
    if group_size == 1 {
        "single".into()
    } else if group_size == n_ris {
        "fully".into()
    } else {
        format!("group:{group_size}")
    }
}

fn list<T, F>(key: &str, value: &str, mut parse: F) -> Result<Vec<T>>
where
    F: FnMut(&str) -> std::result::Result<T, String>,
{
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse(s).map_err(|m| Error::config(key, m)))
        .collect()
}

fn scalar<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::config(key, format!("cannot parse `{}`", value.trim())))
}

fn number<T: FromStr>(s: &str) -> std::result::Result<T, String> {
    s.parse().map_err(|_| format!("cannot parse `{s}`"))
}

fn position(key: &str, value: &str) -> Result<[f64; 2]> {
    let v: Vec<f64> = list(key, value, number)?;
    match v.as_slice() {
        [x, y] => Ok([*x, *y]),
        _ => Err(Error::config(key, "expected `x, y`")),
    }
}

fn boolean(key: &str, value: &str) -> Result<bool> {
    match value.trim() {
        "true" | "on" | "yes" | "1" => Ok(true),
        "false" | "off" | "no" | "0" => Ok(false),
        other => Err(Error::config(key, format!("expected a boolean, got `{other}`"))),
    }
}

/// Applies the assignments in `text` on top of `cfg`.
pub fn apply_config_text(cfg: &mut ExperimentConfig, text: &str) -> Result<()> {
    let mut n_tx: Option<Vec<usize>> = None;
    let mut n_rx: Option<Vec<usize>> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::config(
                format!("line {}", lineno + 1),
                format!("expected `key = value`, got `{line}`"),
            )
        })?;
        let key = key.trim();
        let value = value.trim();
        match key {
            "tx_pos" => cfg.base.tx_pos = position(key, value)?,
            "rx_pos" => cfg.base.rx_pos = position(key, value)?,
            "ris_pos" => cfg.base.ris_pos = position(key, value)?,
            "l0_db" => cfg.base.ref_loss = db_to_linear(scalar(key, value)?),
            "alpha_rt" => cfg.base.alpha_rt = scalar(key, value)?,
            "alpha_ri" => cfg.base.alpha_ri = scalar(key, value)?,
            "alpha_it" => cfg.base.alpha_it = scalar(key, value)?,
            "tx_power" => cfg.base.tx_power = scalar(key, value)?,
            "mode" => cfg.base.mode = Mode::from_str(value).map_err(|m| Error::config(key, m))?,
            "direct_link" => cfg.base.direct_link = boolean(key, value)?,
            "trials" => cfg.base.trials = scalar(key, value)?,
            "seed" => cfg.base.seed = scalar(key, value)?,
            "n_ris" => cfg.n_ris = list(key, value, number)?,
            "n_tx" => n_tx = Some(list(key, value, number)?),
            "n_rx" => n_rx = Some(list(key, value, number)?),
            "n_users" => cfg.n_users = list(key, value, number)?,
            "group_size" => {
                cfg.group_size = list(key, value, |s| match s {
                    "all" => Ok(GroupChoice::AllDivisors),
                    "full" => Ok(GroupChoice::Full),
                    n => number(n).map(GroupChoice::Size),
                })?
            }
            "architectures" => cfg.architectures = list(key, value, |s| Ok(s.to_string()))?,
            "fading" => cfg.fading = list(key, value, Fading::from_str)?,
            "k_factor_db" => cfg.k_factor_db = scalar(key, value)?,
            "epsilon" => cfg.epsilon = scalar(key, value)?,
            "max_iters" => cfg.max_iters = scalar(key, value)?,
            "oracle_instances" => cfg.oracle_instances = scalar(key, value)?,
            "oracle_sizes" => cfg.oracle_sizes = list(key, value, number)?,
            "timing" => cfg.timing = boolean(key, value)?,
            "bench_max_dense" => cfg.bench_max_dense = scalar(key, value)?,
            other => return Err(Error::config(other, "unknown key")),
        }
    }
    if n_tx.is_some() || n_rx.is_some() {
        let current_tx: Vec<usize> = cfg.antennas.iter().map(|a| a.0).collect();
        let current_rx: Vec<usize> = cfg.antennas.iter().map(|a| a.1).collect();
        let tx = n_tx.unwrap_or(current_tx);
        let rx = n_rx.unwrap_or(current_rx);
        cfg.antennas = zip_broadcast(&tx, &rx)?;
    }
    cfg.validate()
}

/// Pairs two lists element-wise; a single-element list is repeated.
fn zip_broadcast(tx: &[usize], rx: &[usize]) -> Result<Vec<(usize, usize)>> {
    match (tx.len(), rx.len()) {
        (a, b) if a == b => Ok(tx.iter().copied().zip(rx.iter().copied()).collect()),
        (1, _) => Ok(rx.iter().map(|&r| (tx[0], r)).collect()),
        (_, 1) => Ok(tx.iter().map(|&t| (t, rx[0])).collect()),
        _ => Err(Error::config(
            "n_rx",
            format!("{} values cannot be paired with {} n_tx values", rx.len(), tx.len()),
        )),
    }
}
