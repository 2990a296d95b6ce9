//! Config-driven Monte-Carlo experiments.
//!
//! Every experiment implements [`Experiment`] and is looked up by name in
//! [`ExperimentRegistry`]. Trials run in parallel but each one owns its
//! random stream and writes to its own slot, and all reductions walk the
//! slots in trial order, so results do not depend on the thread count.
//! Wall-clock columns are the only exception.

mod bench;
mod config;
mod sweeps;
mod verify;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

pub use bench::{fit_loglog_slope, run_complexity_bench, time_synthesis, BenchOptions};
pub use config::{apply_config_text, spec_for_group_size, ExperimentConfig, Fading, GroupChoice};
pub use sweeps::{run_mimo_sweep, run_mu_sweep, run_siso_sweep};
pub use verify::run_verify;

use crate::Result;

/// Column order of the CSV output.
pub const CSV_HEADER: [&str; 18] = [
    "experiment",
    "architecture",
    "n_ris",
    "group_size",
    "n_tx",
    "n_rx",
    "n_users",
    "mode",
    "fading",
    "k_factor_db",
    "trials",
    "mean_power_w",
    "mean_bound_w",
    "mean_rel_gap",
    "max_rel_gap",
    "max_constraint_residual",
    "time_median_s",
    "time_mean_s",
];

/// One aggregated sweep point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub experiment: String,
    pub architecture: String,
    pub n_ris: usize,
    pub group_size: usize,
    pub n_tx: usize,
    pub n_rx: usize,
    pub n_users: usize,
    pub mode: String,
    pub fading: String,
    /// `None` for Rayleigh fading.
    pub k_factor_db: Option<f64>,
    pub trials: usize,
    pub mean_power_w: f64,
    pub mean_bound_w: f64,
    pub mean_rel_gap: f64,
    pub max_rel_gap: f64,
    pub max_constraint_residual: f64,
    pub time_median_s: f64,
    pub time_mean_s: f64,
}

impl ResultRow {
    /// The row with wall-clock columns zeroed.
    pub fn without_timing(&self) -> Self {
        Self {
            time_median_s: 0.0,
            time_mean_s: 0.0,
            ..self.clone()
        }
    }
}

/// A named pass/fail outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub experiment: String,
    pub seed: u64,
    pub trials: usize,
    pub metrics: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub rows: Vec<ResultRow>,
    pub summary: Summary,
}

fn sci(x: f64) -> String {
    format!("{x:.9e}")
}

impl ExperimentResult {
    pub fn new(experiment: &str, cfg: &ExperimentConfig) -> Self {
        Self {
            rows: Vec::new(),
            summary: Summary {
                experiment: experiment.to_string(),
                seed: cfg.base.seed,
                trials: cfg.base.trials,
                metrics: BTreeMap::new(),
                checks: Vec::new(),
            },
        }
    }

    pub fn metric(&mut self, name: impl Into<String>, value: f64) {
        self.summary.metrics.insert(name.into(), value);
    }

    /// Records a check that passes when `value ≤ threshold`.
    pub fn check_at_most(&mut self, name: impl Into<String>, value: f64, threshold: f64, detail: impl Into<String>) {
        self.summary.checks.push(Check {
            name: name.into(),
            passed: value <= threshold,
            value,
            threshold,
            detail: detail.into(),
        });
    }

    /// Records a check that passes when `value ≥ threshold`.
    pub fn check_at_least(&mut self, name: impl Into<String>, value: f64, threshold: f64, detail: impl Into<String>) {
        self.summary.checks.push(Check {
            name: name.into(),
            passed: value >= threshold,
            value,
            threshold,
            detail: detail.into(),
        });
    }

    pub fn all_checks_passed(&self) -> bool {
        self.summary.checks.iter().all(|c| c.passed)
    }

    pub fn to_csv(&self) -> String {
        let mut out = CSV_HEADER.join(",");
        out.push('\n');
        for r in &self.rows {
            let k = r.k_factor_db.map(sci).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.experiment,
                r.architecture,
                r.n_ris,
                r.group_size,
                r.n_tx,
                r.n_rx,
                r.n_users,
                r.mode,
                r.fading,
                k,
                r.trials,
                sci(r.mean_power_w),
                sci(r.mean_bound_w),
                sci(r.mean_rel_gap),
                sci(r.max_rel_gap),
                sci(r.max_constraint_residual),
                sci(r.time_median_s),
                sci(r.time_mean_s),
            );
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.summary)?)
    }

    /// Writes `<experiment>.csv` and `<experiment>.json` into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir)?;
        let csv = dir.join(format!("{}.csv", self.summary.experiment));
        let json = dir.join(format!("{}.json", self.summary.experiment));
        std::fs::write(&csv, self.to_csv())?;
        std::fs::write(&json, self.to_json()? + "\n")?;
        Ok((csv, json))
    }
}

/// A runnable experiment with its own defaults.
pub trait Experiment: Send + Sync {
    fn name(&self) -> &'static str;

    fn description(&self) -> &'static str;

    /// Configuration used before any config file is applied.
    fn default_config(&self) -> ExperimentConfig;

    fn run(&self, cfg: &ExperimentConfig) -> Result<ExperimentResult>;
}

/// Name-keyed experiments.
pub struct ExperimentRegistry {
    entries: BTreeMap<&'static str, Box<dyn Experiment>>,
}

impl Default for ExperimentRegistry {
    fn default() -> Self {
        let mut r = Self {
            entries: BTreeMap::new(),
        };
        r.register(Box::new(sweeps::SisoSweep));
        r.register(Box::new(sweeps::MimoSweep));
        r.register(Box::new(sweeps::MuSweep));
        r.register(Box::new(bench::ComplexityBench));
        r.register(Box::new(verify::VerifySuite));
        r
    }
}

impl ExperimentRegistry {
    pub fn register(&mut self, e: Box<dyn Experiment>) {
        self.entries.insert(e.name(), e);
    }

    pub fn get(&self, name: &str) -> Option<&dyn Experiment> {
        self.entries.get(name).map(|b| b.as_ref())
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.keys().copied()
    }
}

/// Per-trial measurements of one design.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct TrialRecord {
    pub power: f64,
    pub bound: f64,
    pub residual: f64,
    pub seconds: f64,
}

impl TrialRecord {
    pub fn gap(&self) -> f64 {
        if self.bound > 0.0 {
            (self.bound - self.power) / self.bound
        } else {
            0.0
        }
    }
}

/// Sweep point labels shared by all rows of an experiment.
#[derive(Debug, Clone)]
pub(crate) struct RowLabel<'a> {
    pub experiment: &'a str,
    pub architecture: String,
    pub n_ris: usize,
    pub group_size: usize,
    pub n_tx: usize,
    pub n_rx: usize,
    pub n_users: usize,
    pub fading: Fading,
}

pub(crate) fn aggregate(label: RowLabel<'_>, cfg: &ExperimentConfig, records: &[TrialRecord]) -> ResultRow {
    let n = records.len().max(1) as f64;
    let mean = |f: &dyn Fn(&TrialRecord) -> f64| records.iter().map(f).sum::<f64>() / n;
    let mut times: Vec<f64> = records.iter().map(|r| r.seconds).collect();
    times.sort_by(f64::total_cmp);
    ResultRow {
        experiment: label.experiment.to_string(),
        architecture: label.architecture,
        n_ris: label.n_ris,
        group_size: label.group_size,
        n_tx: label.n_tx,
        n_rx: label.n_rx,
        n_users: label.n_users,
        mode: cfg.base.mode.as_str().to_string(),
        fading: label.fading.as_str().to_string(),
        k_factor_db: (label.fading == Fading::Rician).then_some(cfg.k_factor_db),
        trials: records.len(),
        mean_power_w: mean(&|r| r.power),
        mean_bound_w: mean(&|r| r.bound),
        mean_rel_gap: mean(&|r| r.gap()),
        max_rel_gap: records.iter().map(TrialRecord::gap).fold(f64::NEG_INFINITY, f64::max),
        max_constraint_residual: records.iter().map(|r| r.residual).fold(0.0, f64::max),
        time_median_s: median_sorted(&times),
        time_mean_s: mean(&|r| r.seconds),
    }
}

pub(crate) fn median_sorted(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        n if n % 2 == 1 => v[n / 2],
        n => 0.5 * (v[n / 2 - 1] + v[n / 2]),
    }
}

/// Wall-clock seconds of `f`, or zero when timing is off.
pub(crate) fn timed<T>(enabled: bool, f: impl FnOnce() -> T) -> (T, f64) {
    if enabled {
        let start = std::time::Instant::now();
        let out = f();
        (out, start.elapsed().as_secs_f64())
    } else {
        (f(), 0.0)
    }
}
