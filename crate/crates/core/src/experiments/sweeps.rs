use rayon::prelude::*;

use super::{aggregate, timed, Experiment, ExperimentConfig, ExperimentResult, Fading, GroupChoice, RowLabel, TrialRecord};
use crate::baselines::no_ris_power;
use crate::channel::build_scenario;
use crate::design::{DesignerRegistry, ScatteringDesigner};
use crate::mimo::{alternating_design, design_fc_no_direct, AlternatingOptions};
use crate::multiuser::{design_fc_no_direct_mu, design_general_mu, stack_weighted};
use crate::synth::received_power;
use crate::{Error, Result};

const GAP_TOL: f64 = 1e-9;
const CONSTRAINT_TOL: f64 = 1e-10;

fn designers(cfg: &ExperimentConfig, n_ris: usize) -> Result<Vec<Box<dyn ScatteringDesigner>>> {
    let registry = DesignerRegistry::default();
    cfg.designer_specs(n_ris)
        .iter()
        .map(|spec| {
            let d = registry
                .create(spec)
                .map_err(|e| Error::config("architectures", e.to_string()))?;
            d.group_size(n_ris)
                .map_err(|e| Error::config("architectures", format!("{spec} on {n_ris} elements: {e}")))?;
            Ok(d)
        })
        .collect()
}

/// Worst-case quantities across every trial of an experiment.
#[derive(Debug, Clone, Copy)]
struct Extremes {
    min_gap: f64,
    max_residual: f64,
}

impl Default for Extremes {
    fn default() -> Self {
        Self {
            min_gap: f64::INFINITY,
            max_residual: 0.0,
        }
    }
}

impl Extremes {
    fn update(&mut self, records: &[TrialRecord]) {
        for r in records {
            self.min_gap = self.min_gap.min(r.gap());
            self.max_residual = self.max_residual.max(r.residual);
        }
    }

    fn report(&self, res: &mut ExperimentResult) {
        let min_gap = if self.min_gap.is_finite() { self.min_gap } else { 0.0 };
        res.metric("min_trial_rel_gap", min_gap);
        res.metric("max_constraint_residual", self.max_residual);
        res.check_at_least("gap_non_negative", min_gap, -GAP_TOL, "every trial's (bound - achieved)/bound");
        res.check_at_most(
            "constraints",
            self.max_residual,
            CONSTRAINT_TOL,
            "symmetry and unitarity of every synthesized matrix",
        );
    }
}

/// Splits per-trial rows of per-designer values into per-designer columns.
fn columns<T: Copy>(per_trial: &[Vec<T>], n_designers: usize) -> Vec<Vec<T>> {
    (0..n_designers)
        .map(|d| per_trial.iter().map(|row| row[d]).collect())
        .collect()
}

fn point_name(fading: Fading, n_ris: usize) -> String {
    format!("{}/n{}", fading.as_str(), n_ris)
}

pub(crate) struct SisoSweep;

impl Experiment for SisoSweep {
    fn name(&self) -> &'static str {
        "siso"
    }

    fn description(&self) -> &'static str {
        "single-antenna received power of every architecture against its upper bound"
    }

    fn default_config(&self) -> ExperimentConfig {
        let mut cfg = ExperimentConfig {
            n_ris: vec![2, 4, 8, 16, 32, 64],
            group_size: vec![GroupChoice::AllDivisors],
            fading: vec![Fading::Rayleigh, Fading::Rician],
            ..ExperimentConfig::default()
        };
        cfg.base.trials = 10_000;
        cfg
    }

    fn run(&self, cfg: &ExperimentConfig) -> Result<ExperimentResult> {
        run_siso_sweep(cfg)
    }
}

/// Monte-Carlo mean of achieved power and bound per `(fading, N_I, N_G)`.
pub fn run_siso_sweep(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    if cfg.antennas.iter().any(|&a| a != (1, 1)) {
        return Err(Error::config("n_tx", "the siso sweep needs n_tx = n_rx = 1"));
    }
    if cfg.n_users.iter().any(|&k| k != 1) {
        return Err(Error::config("n_users", "the siso sweep has a single user"));
    }
    let mut res = ExperimentResult::new("siso", cfg);
    let mut extremes = Extremes::default();
    for &fading in &cfg.fading {
        for &n in &cfg.n_ris {
            let ds = designers(cfg, n)?;
            let scenario = cfg.scenario(n, (1, 1), 1, fading);
            let per_trial: Vec<(Vec<TrialRecord>, f64)> = (0..cfg.base.trials as u64)
                .into_par_iter()
                .map(|t| {
                    let ch = build_scenario(&scenario, t)?;
                    let link = ch.siso().expect("single-antenna scenario");
                    let records = ds
                        .iter()
                        .map(|d| {
                            let (theta, seconds) = timed(cfg.timing, || d.design(&link));
                            let theta = theta?;
                            Ok(TrialRecord {
                                power: received_power(&link, &theta, scenario.tx_power)?,
                                bound: d.bound(&link, scenario.tx_power)?,
                                residual: theta.constraint_residual().max(),
                                seconds,
                            })
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Ok((records, no_ris_power(link.h_rt, scenario.tx_power)))
                })
                .collect::<Result<Vec<_>>>()?;

            let records: Vec<Vec<TrialRecord>> = per_trial.iter().map(|p| p.0.clone()).collect();
            let point = point_name(fading, n);
            let no_ris = per_trial.iter().map(|p| p.1).sum::<f64>() / per_trial.len() as f64;
            res.metric(format!("no_ris_mean_power_w/{point}"), no_ris);
            let mut means = Vec::new();
            for (d, column) in ds.iter().zip(columns(&records, ds.len())) {
                extremes.update(&column);
                let row = aggregate(
                    RowLabel {
                        experiment: "siso",
                        architecture: d.name(),
                        n_ris: n,
                        group_size: d.group_size(n)?,
                        n_tx: 1,
                        n_rx: 1,
                        n_users: 1,
                        fading,
                    },
                    cfg,
                    &column,
                );
                means.push((d.name(), row.mean_power_w));
                res.check_at_most(
                    format!("bound_achieved/{point}/{}", d.name()),
                    row.max_rel_gap,
                    GAP_TOL,
                    "largest relative gap to the architecture's upper bound",
                );
                res.rows.push(row);
            }
            let find = |name: &str| means.iter().find(|m| m.0 == name).map(|m| m.1);
            if let (Some(fc), Some(sc)) = (find("fully"), find("single")) {
                if n > 1 && sc > 0.0 {
                    res.metric(format!("gain_fully_over_single/{point}"), fc / sc);
                }
            }
        }
    }
    extremes.report(&mut res);
    Ok(res)
}

pub(crate) struct MimoSweep;

impl Experiment for MimoSweep {
    fn name(&self) -> &'static str {
        "mimo"
    }

    fn description(&self) -> &'static str {
        "single-user MIMO: closed form without direct link, alternating design otherwise"
    }

    fn default_config(&self) -> ExperimentConfig {
        let mut cfg = ExperimentConfig {
            n_ris: vec![16, 32],
            antennas: vec![(2, 2), (4, 4)],
            group_size: vec![GroupChoice::Size(1), GroupChoice::Size(4), GroupChoice::Full],
            ..ExperimentConfig::default()
        };
        cfg.base.trials = 1000;
        cfg
    }

    fn run(&self, cfg: &ExperimentConfig) -> Result<ExperimentResult> {
        run_mimo_sweep(cfg)
    }
}

/// Per-trial outcome of one iterative design.
#[derive(Debug, Clone, Copy)]
struct IterStats {
    record: TrialRecord,
    iterations: usize,
    converged: bool,
    monotone: bool,
    above_lower: bool,
}

fn trace_is_monotone(trace: &[f64]) -> bool {
    trace.windows(2).all(|w| w[1] >= w[0] - 1e-12 * w[0].abs())
}

/// Fraction of trials whose powers do not decrease with the group size.
fn ordering_fraction(per_trial: &[Vec<IterStats>], group_sizes: &[usize]) -> f64 {
    let mut order: Vec<usize> = (0..group_sizes.len()).collect();
    order.sort_by_key(|&i| group_sizes[i]);
    let ok = per_trial
        .iter()
        .filter(|row| {
            order
                .windows(2)
                .all(|w| row[w[1]].record.power >= row[w[0]].record.power * (1.0 - GAP_TOL))
        })
        .count();
    ok as f64 / per_trial.len().max(1) as f64
}

fn report_iterative(
    res: &mut ExperimentResult,
    point: &str,
    names: &[String],
    group_sizes: &[usize],
    per_trial: &[Vec<IterStats>],
) {
    let trials = per_trial.len().max(1) as f64;
    for (d, name) in names.iter().enumerate() {
        let col = per_trial.iter().map(|r| r[d]);
        let iters: f64 = col.clone().map(|s| s.iterations as f64).sum::<f64>() / trials;
        let conv = col.clone().filter(|s| s.converged).count() as f64 / trials;
        let mono = col.clone().filter(|s| s.monotone).count() as f64 / trials;
        let lower = col.filter(|s| s.above_lower).count() as f64 / trials;
        res.metric(format!("mean_iterations/{point}/{name}"), iters);
        res.metric(format!("converged_fraction/{point}/{name}"), conv);
        res.check_at_least(format!("trace_monotone/{point}/{name}"), mono, 1.0, "fraction of monotone power traces");
        res.check_at_least(
            format!("above_lower_bound/{point}/{name}"),
            lower,
            1.0,
            "fraction of runs ending at or above the initialization bound",
        );
    }
    if names.len() > 1 {
        res.check_at_least(
            format!("ordering/{point}"),
            ordering_fraction(per_trial, group_sizes),
            0.99,
            "fraction of trials with power non-decreasing in the group size",
        );
    }
}

/// Single-user MIMO sweep over `(fading, N_I, (N_T, N_R), N_G)`.
pub fn run_mimo_sweep(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    if cfg.n_users.iter().any(|&k| k != 1) {
        return Err(Error::config("n_users", "the mimo sweep has a single user"));
    }
    let options = AlternatingOptions {
        epsilon: cfg.epsilon,
        max_iters: cfg.max_iters,
    };
    let mut res = ExperimentResult::new("mimo", cfg);
    let mut extremes = Extremes::default();
    for &fading in &cfg.fading {
        for &n in &cfg.n_ris {
            let ds = designers(cfg, n)?;
            for &(n_tx, n_rx) in &cfg.antennas {
                let scenario = cfg.scenario(n, (n_tx, n_rx), 1, fading);
                let per_trial: Vec<Vec<IterStats>> = (0..cfg.base.trials as u64)
                    .into_par_iter()
                    .map(|t| {
                        let ch = build_scenario(&scenario, t)?;
                        ds.iter()
                            .map(|d| {
                                let closed_form = !scenario.direct_link && d.group_size(n)? == n;
                                let (report, seconds) = timed(cfg.timing, || {
                                    if closed_form {
                                        design_fc_no_direct(&ch.h_ri, &ch.h_it, scenario.tx_power)
                                    } else {
                                        alternating_design(&ch, d.as_ref(), scenario.tx_power, options)
                                    }
                                });
                                let report = report?;
                                Ok(IterStats {
                                    record: TrialRecord {
                                        power: report.final_power(),
                                        bound: report.bound,
                                        residual: report.theta.constraint_residual().max(),
                                        seconds,
                                    },
                                    iterations: report.iterations,
                                    converged: report.converged,
                                    monotone: trace_is_monotone(&report.power_trace),
                                    above_lower: report.final_power() >= report.lower_bound * (1.0 - 1e-12),
                                })
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;

                let point = format!("{}/{}x{}", point_name(fading, n), n_rx, n_tx);
                let names: Vec<String> = ds.iter().map(|d| d.name()).collect();
                let sizes: Vec<usize> = ds.iter().map(|d| d.group_size(n)).collect::<Result<_>>()?;
                for (d, column) in ds.iter().zip(columns(&per_trial, ds.len())) {
                    let records: Vec<TrialRecord> = column.iter().map(|s| s.record).collect();
                    extremes.update(&records);
                    let row = aggregate(
                        RowLabel {
                            experiment: "mimo",
                            architecture: d.name(),
                            n_ris: n,
                            group_size: d.group_size(n)?,
                            n_tx,
                            n_rx,
                            n_users: 1,
                            fading,
                        },
                        cfg,
                        &records,
                    );
                    if !scenario.direct_link && d.group_size(n)? == n {
                        res.check_at_most(
                            format!("bound_achieved/{point}/{}", d.name()),
                            row.max_rel_gap,
                            GAP_TOL,
                            "gap to P_T |H_RI|^2 |H_IT|^2",
                        );
                    }
                    res.rows.push(row);
                }
                report_iterative(&mut res, &point, &names, &sizes, &per_trial);
            }
        }
    }
    extremes.report(&mut res);
    Ok(res)
}

pub(crate) struct MuSweep;

impl Experiment for MuSweep {
    fn name(&self) -> &'static str {
        "mu"
    }

    fn description(&self) -> &'static str {
        "multi-user weighted sum power against the number of users"
    }

    fn default_config(&self) -> ExperimentConfig {
        let mut cfg = ExperimentConfig {
            n_ris: vec![16, 32],
            antennas: vec![(4, 1)],
            n_users: vec![1, 2, 4],
            group_size: vec![GroupChoice::Size(1), GroupChoice::Size(4), GroupChoice::Full],
            ..ExperimentConfig::default()
        };
        cfg.base.trials = 1000;
        cfg
    }

    fn run(&self, cfg: &ExperimentConfig) -> Result<ExperimentResult> {
        run_mu_sweep(cfg)
    }
}

/// Multi-user sweep over `(fading, N_I, N_T, K, N_G)` with unit weights.
pub fn run_mu_sweep(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    if cfg.antennas.iter().any(|&(_, n_rx)| n_rx != 1) {
        return Err(Error::config("n_rx", "multi-user receivers have a single antenna"));
    }
    let options = AlternatingOptions {
        epsilon: cfg.epsilon,
        max_iters: cfg.max_iters,
    };
    let mut res = ExperimentResult::new("mu", cfg);
    let mut extremes = Extremes::default();
    let mut users = cfg.n_users.clone();
    users.sort_unstable();
    for &fading in &cfg.fading {
        for &n in &cfg.n_ris {
            let ds = designers(cfg, n)?;
            for &(n_tx, _) in &cfg.antennas {
                // Mean sum power per designer, in increasing K.
                let mut by_k: Vec<Vec<f64>> = vec![Vec::new(); ds.len()];
                for &k in &users {
                    let scenario = cfg.scenario(n, (n_tx, 1), k, fading);
                    let per_trial: Vec<Vec<IterStats>> = (0..cfg.base.trials as u64)
                        .into_par_iter()
                        .map(|t| {
                            let ch = build_scenario(&scenario, t)?;
                            let system = stack_weighted(&ch, &ch.user_weights)?;
                            ds.iter()
                                .map(|d| {
                                    let closed_form = !scenario.direct_link && d.group_size(n)? == n;
                                    if closed_form {
                                        let (out, seconds) =
                                            timed(cfg.timing, || design_fc_no_direct_mu(&system, scenario.tx_power));
                                        let out = out?;
                                        Ok(IterStats {
                                            record: TrialRecord {
                                                power: out.sum_power,
                                                bound: out.bound,
                                                residual: out.theta.constraint_residual().max(),
                                                seconds,
                                            },
                                            iterations: 1,
                                            converged: true,
                                            monotone: true,
                                            above_lower: true,
                                        })
                                    } else {
                                        let (report, seconds) = timed(cfg.timing, || {
                                            design_general_mu(&system, d.as_ref(), scenario.tx_power, options)
                                        });
                                        let report = report?;
                                        Ok(IterStats {
                                            record: TrialRecord {
                                                power: report.final_power(),
                                                bound: report.bound,
                                                residual: report.theta.constraint_residual().max(),
                                                seconds,
                                            },
                                            iterations: report.iterations,
                                            converged: report.converged,
                                            monotone: trace_is_monotone(&report.power_trace),
                                            above_lower: report.final_power() >= report.lower_bound * (1.0 - 1e-12),
                                        })
                                    }
                                })
                                .collect::<Result<Vec<_>>>()
                        })
                        .collect::<Result<Vec<_>>>()?;

                    let point = format!("{}/t{}/k{}", point_name(fading, n), n_tx, k);
                    let names: Vec<String> = ds.iter().map(|d| d.name()).collect();
                    let sizes: Vec<usize> = ds.iter().map(|d| d.group_size(n)).collect::<Result<_>>()?;
                    for (i, (d, column)) in ds.iter().zip(columns(&per_trial, ds.len())).enumerate() {
                        let records: Vec<TrialRecord> = column.iter().map(|s| s.record).collect();
                        extremes.update(&records);
                        let row = aggregate(
                            RowLabel {
                                experiment: "mu",
                                architecture: d.name(),
                                n_ris: n,
                                group_size: d.group_size(n)?,
                                n_tx,
                                n_rx: 1,
                                n_users: k,
                                fading,
                            },
                            cfg,
                            &records,
                        );
                        if !scenario.direct_link && d.group_size(n)? == n {
                            res.check_at_most(
                                format!("bound_achieved/{point}/{}", d.name()),
                                row.max_rel_gap,
                                GAP_TOL,
                                "gap to P_T |G_RI|^2 |H_IT|^2",
                            );
                        }
                        by_k[i].push(row.mean_power_w);
                        res.rows.push(row);
                    }
                    report_iterative(&mut res, &point, &names, &sizes, &per_trial);
                }
                for (d, means) in ds.iter().zip(&by_k) {
                    let increasing = means.windows(2).all(|w| w[1] >= w[0]);
                    res.check_at_least(
                        format!("increasing_in_users/{}/t{}/{}", point_name(fading, n), n_tx, d.name()),
                        if increasing { 1.0 } else { 0.0 },
                        1.0,
                        "mean weighted sum power non-decreasing in the number of users",
                    );
                }
            }
        }
    }
    extremes.report(&mut res);
    Ok(res)
}
