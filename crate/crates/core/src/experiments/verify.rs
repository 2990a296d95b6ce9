use rayon::prelude::*;

use super::{aggregate, Experiment, ExperimentConfig, ExperimentResult, Fading, GroupChoice, RowLabel, TrialRecord};
use crate::channel::build_scenario;
use crate::oracle::{brute_force_optimum, OracleBudget};
use crate::synth::{build_quadform, synthesize_block, verify_propositions, ScatteringMatrix, SisoLink};
use crate::{Complex64, Result};

const TRACE_TOL: f64 = 1e-10;
const UNIT_GAIN_TOL: f64 = 1e-10;
const ORACLE_SLACK: f64 = 1e-6;

pub(crate) struct VerifySuite;

impl Experiment for VerifySuite {
    fn name(&self) -> &'static str {
        "verify"
    }

    fn description(&self) -> &'static str {
        "eigenstructure properties of the quadratic form and brute-force optimality checks"
    }

    fn default_config(&self) -> ExperimentConfig {
        let mut cfg = ExperimentConfig {
            n_ris: vec![2, 3, 4, 5, 10, 32],
            group_size: vec![GroupChoice::Full],
            ..ExperimentConfig::default()
        };
        cfg.base.trials = 1000;
        cfg
    }

    fn run(&self, cfg: &ExperimentConfig) -> Result<ExperimentResult> {
        run_verify(cfg)
    }
}

/// Surface channels of trial `t`, normalized, without a direct link.
fn unit_link(cfg: &ExperimentConfig, n: usize, t: u64) -> Result<SisoLink> {
    let scenario = cfg.scenario(n, (1, 1), 1, Fading::Rayleigh);
    let link = build_scenario(&scenario, t)?.siso().expect("single antenna");
    let r = link.h_ri.norm();
    let c = link.h_it.norm();
    Ok(SisoLink {
        h_rt: Complex64::new(0.0, 0.0),
        h_ri: link.h_ri.unscale(r),
        h_it: link.h_it.unscale(c),
    })
}

#[derive(Debug, Clone, Copy)]
struct PropOutcome {
    trace: f64,
    rank_ok: bool,
    sign_ok: bool,
    weyl_ok: bool,
    det_ok: bool,
    record: TrialRecord,
}

/// Normalized gain `|ĥ_RI Θ ĥ_IT|²` of the closed-form block.
fn closed_form_gain(link: &SisoLink) -> Result<(f64, f64)> {
    let theta = ScatteringMatrix::from_blocks(vec![synthesize_block(&link.h_ri, &link.h_it)?])?;
    let g = theta.cascade(&link.h_ri, &link.h_it)?;
    Ok((g.norm_sqr(), theta.constraint_residual().max()))
}

/// Structural property suite over `n_ris` and the oracle comparison over
/// `oracle_sizes`. Every check must pass for the run to succeed.
pub fn run_verify(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let mut res = ExperimentResult::new("verify", cfg);

    for &n in &cfg.n_ris {
        let outcomes: Vec<PropOutcome> = (0..cfg.base.trials as u64)
            .into_par_iter()
            .map(|t| {
                let link = unit_link(cfg, n, t)?;
                let qf = build_quadform(&link.h_ri, &link.h_it)?;
                let rep = verify_propositions(&qf)?;
                let (gain, residual) = closed_form_gain(&link)?;
                Ok(PropOutcome {
                    trace: rep.trace_residual,
                    rank_ok: rep.rank == rep.expected_rank,
                    sign_ok: rep.sign_ok,
                    weyl_ok: rep.weyl_ok,
                    det_ok: rep.det_positive.unwrap_or(true),
                    record: TrialRecord {
                        power: gain,
                        bound: 1.0,
                        residual,
                        seconds: 0.0,
                    },
                })
            })
            .collect::<Result<Vec<_>>>()?;

        let trials = outcomes.len() as f64;
        let frac = |f: &dyn Fn(&PropOutcome) -> bool| outcomes.iter().filter(|o| f(o)).count() as f64 / trials;
        let max_trace = outcomes.iter().map(|o| o.trace).fold(0.0, f64::max);
        res.check_at_most(format!("trace/n{n}"), max_trace, TRACE_TOL, "largest |tr A|");
        res.check_at_least(format!("rank/n{n}"), frac(&|o| o.rank_ok), 1.0, "fraction with rank min(4, N)");
        if n >= 4 {
            res.check_at_least(format!("sign_pattern/n{n}"), frac(&|o| o.sign_ok), 1.0, "fraction with two positive and two negative eigenvalues");
        }
        if n > 4 {
            res.check_at_least(format!("weyl/n{n}"), frac(&|o| o.weyl_ok), 1.0, "fraction whose inner eigenvalues are pinned to zero");
        }
        if n == 4 {
            res.check_at_least(format!("det_positive/n{n}"), frac(&|o| o.det_ok), 1.0, "fraction with det A > 0");
        }
        let records: Vec<TrialRecord> = outcomes.iter().map(|o| o.record).collect();
        let worst_unit = records.iter().map(|r| (r.power - 1.0).abs()).fold(0.0, f64::max);
        res.check_at_most(format!("unit_gain/n{n}"), worst_unit, UNIT_GAIN_TOL, "largest |gain - 1|");
        let row = aggregate(
            RowLabel {
                experiment: "verify",
                architecture: "fully".into(),
                n_ris: n,
                group_size: n,
                n_tx: 1,
                n_rx: 1,
                n_users: 1,
                fading: Fading::Rayleigh,
            },
            cfg,
            &records,
        );
        res.check_at_most(format!("constraints/n{n}"), row.max_constraint_residual, 1e-10, "symmetry and unitarity");
        res.rows.push(row);
    }

    let budget = OracleBudget {
        seed: cfg.base.seed,
        ..OracleBudget::default()
    };
    for &n in &cfg.oracle_sizes {
        let mut worst_excess = f64::NEG_INFINITY;
        let mut worst_unit: f64 = 0.0;
        let mut lowest_oracle = f64::INFINITY;
        for t in 0..cfg.oracle_instances as u64 {
            // Offset the stream so oracle instances differ from the sweep above.
            let link = unit_link(cfg, n, 1_000_000 + t)?;
            let (alg, _) = closed_form_gain(&link)?;
            let oracle = brute_force_optimum(&link, &budget)?;
            worst_excess = worst_excess.max(oracle.best - alg);
            worst_unit = worst_unit.max((alg - 1.0).abs());
            lowest_oracle = lowest_oracle.min(oracle.best);
        }
        if cfg.oracle_instances == 0 {
            continue;
        }
        res.metric(format!("oracle_lowest_best/n{n}"), lowest_oracle);
        res.check_at_most(
            format!("oracle_excess/n{n}"),
            worst_excess,
            ORACLE_SLACK,
            "largest (oracle best - closed form)",
        );
        res.check_at_most(format!("oracle_unit_gain/n{n}"), worst_unit, UNIT_GAIN_TOL, "largest |closed form - 1|");
    }
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_verify_passes() {
        let mut cfg = VerifySuite.default_config();
        cfg.n_ris = vec![2, 4, 6];
        cfg.base.trials = 30;
        cfg.oracle_sizes = vec![2];
        cfg.oracle_instances = 1;
        let res = run_verify(&cfg).unwrap();
        assert!(res.all_checks_passed(), "{:?}", res.summary.checks);
    }
}
