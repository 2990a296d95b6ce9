use std::hint::black_box;
use std::time::Instant;

use super::{median_sorted, Experiment, ExperimentConfig, ExperimentResult, Fading, ResultRow};
use crate::channel::build_scenario;
use crate::design::{DesignerRegistry, ScatteringDesigner};
use crate::synth::{received_power, SisoLink};
use crate::{Error, Result};

/// Repetition control for one timing measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchOptions {
    /// Timed batches; the reported figure is the median over batches.
    pub samples: usize,
    /// Batches shorter than this get more repetitions, so timer resolution
    /// does not dominate the smallest sizes.
    pub min_batch_seconds: f64,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self {
            samples: 15,
            min_batch_seconds: 2e-2,
        }
    }
}

/// Median and mean seconds per synthesis call, and the repetition count.
pub fn time_synthesis(
    designer: &dyn ScatteringDesigner,
    link: &SisoLink,
    options: BenchOptions,
) -> Result<(f64, f64, usize)> {
    // Warm-up, and the error path if the designer rejects the link.
    black_box(designer.design(link)?);
    let mut reps = 1usize;
    loop {
        let start = Instant::now();
        for _ in 0..reps {
            black_box(designer.design(black_box(link))?);
        }
        if start.elapsed().as_secs_f64() >= options.min_batch_seconds || reps >= 1 << 20 {
            break;
        }
        reps *= 2;
    }
    let mut per_call = Vec::with_capacity(options.samples);
    for _ in 0..options.samples.max(1) {
        let start = Instant::now();
        for _ in 0..reps {
            black_box(designer.design(black_box(link))?);
        }
        per_call.push(start.elapsed().as_secs_f64() / reps as f64);
    }
    let mean = per_call.iter().sum::<f64>() / per_call.len() as f64;
    per_call.sort_by(f64::total_cmp);
    Ok((median_sorted(&per_call), mean, reps))
}

/// Least-squares slope of `log y` against `log x`.
pub fn fit_loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 || points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return None;
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Smallest group size whose doubling ratio is checked.
pub const DOUBLING_MIN_GROUP: usize = 32;

pub(crate) struct ComplexityBench;

impl Experiment for ComplexityBench {
    fn name(&self) -> &'static str {
        "bench"
    }

    fn description(&self) -> &'static str {
        "wall time of one synthesis against the number of elements"
    }

    fn default_config(&self) -> ExperimentConfig {
        let mut cfg = ExperimentConfig {
            n_ris: vec![16, 32, 64, 128, 256, 512, 1024],
            architectures: vec!["fully".into(), "group:4".into(), "group:32".into(), "group:64".into()],
            ..ExperimentConfig::default()
        };
        cfg.base.trials = 15;
        cfg
    }

    fn run(&self, cfg: &ExperimentConfig) -> Result<ExperimentResult> {
        run_complexity_bench(cfg)
    }
}

/// Times each designer over the `n_ris` list and fits log-log slopes.
///
/// `trials` is the number of timed batches per point. Dense designers
/// (group size equal to `N_I`) are skipped above `bench_max_dense`.
/// Expected slopes are checked only when the sizes span a decade.
pub fn run_complexity_bench(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let registry = DesignerRegistry::default();
    let options = BenchOptions {
        samples: cfg.base.trials,
        ..BenchOptions::default()
    };
    let specs: Vec<String> = if cfg.architectures.is_empty() {
        return Err(Error::config("architectures", "the benchmark needs explicit architectures"));
    } else {
        cfg.architectures.clone()
    };
    let mut res = ExperimentResult::new("bench", cfg);
    let mut sizes = cfg.n_ris.clone();
    sizes.sort_unstable();
    sizes.dedup();
    for spec in &specs {
        let designer = registry.create(spec).map_err(|e| Error::config("architectures", e.to_string()))?;
        let mut points = Vec::new();
        for &n in &sizes {
            let Ok(ng) = designer.group_size(n) else { continue };
            if ng == n && n > cfg.bench_max_dense && n > 1 {
                continue;
            }
            let scenario = cfg.scenario(n, (1, 1), 1, Fading::Rayleigh);
            let link = build_scenario(&scenario, 0)?.siso().expect("single antenna");
            let (median, mean, _) = if cfg.timing {
                time_synthesis(designer.as_ref(), &link, options)?
            } else {
                (0.0, 0.0, 0)
            };
            let theta = designer.design(&link)?;
            let power = received_power(&link, &theta, scenario.tx_power)?;
            let bound = designer.bound(&link, scenario.tx_power)?;
            let gap = if bound > 0.0 { (bound - power) / bound } else { 0.0 };
            points.push((n as f64, median));
            res.rows.push(ResultRow {
                experiment: "bench".into(),
                architecture: designer.name(),
                n_ris: n,
                group_size: ng,
                n_tx: 1,
                n_rx: 1,
                n_users: 1,
                mode: scenario.mode.as_str().into(),
                fading: Fading::Rayleigh.as_str().into(),
                k_factor_db: None,
                trials: options.samples,
                mean_power_w: power,
                mean_bound_w: bound,
                mean_rel_gap: gap,
                max_rel_gap: gap,
                max_constraint_residual: theta.constraint_residual().max(),
                time_median_s: median,
                time_mean_s: mean,
            });
        }
        if !cfg.timing {
            continue;
        }
        let Some(slope) = fit_loglog_slope(&points) else { continue };
        res.metric(format!("slope/{}", designer.name()), slope);
        let span = points.last().map_or(1.0, |p| p.0) / points.first().map_or(1.0, |p| p.0);
        if span >= 10.0 {
            let fixed_group = designer.name().starts_with("group:");
            let dense = designer.name() == "fully";
            if dense {
                res.summary.checks.push(range_check(format!("slope/{}", designer.name()), slope, 2.5, 3.5));
            } else if fixed_group {
                res.summary.checks.push(range_check(format!("slope/{}", designer.name()), slope, 0.8, 1.3));
            }
        }
    }

    // Doubling the group size at fixed N_I. Small blocks cost about the same
    // whatever their size because per-call overhead dominates, so the ratio
    // is only checked once the smaller group reaches DOUBLING_MIN_GROUP.
    let group_time = |g: usize, n: usize| {
        res.rows
            .iter()
            .find(|r| r.n_ris == n && r.group_size == g && r.architecture.starts_with("group:"))
            .map(|r| r.time_median_s)
    };
    let mut ratios = Vec::new();
    for &n in &sizes {
        for g in 1..n {
            if let (Some(a), Some(b)) = (group_time(g, n), group_time(2 * g, n)) {
                if a > 0.0 {
                    ratios.push((format!("group_doubling/n{n}/{g}->{}", 2 * g), g, b / a));
                }
            }
        }
    }
    for (name, g, ratio) in ratios {
        res.metric(name.clone(), ratio);
        if g >= DOUBLING_MIN_GROUP {
            res.summary.checks.push(range_check(name, ratio, 2.0, 8.0));
        }
    }
    Ok(res)
}

fn range_check(name: String, value: f64, lo: f64, hi: f64) -> super::Check {
    super::Check {
        name,
        passed: (lo..=hi).contains(&value),
        value,
        threshold: hi,
        detail: format!("expected within [{lo}, {hi}]"),
    }
}
