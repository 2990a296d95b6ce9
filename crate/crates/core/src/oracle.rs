//! Brute-force search over symmetric unitary matrices for tiny surfaces.
//!
//! Every symmetric unitary `Θ` can be written `O diag(e^{jd}) Oᵀ` with `O`
//! real orthonormal. The search parameterizes `O` by Givens angles and
//! maximizes `|ĥ_RI Θ ĥ_IT|²` over angles and phases directly, with no use
//! of the closed-form construction. It exists to cross-check that
//! construction on `N ≤ 3`.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::synth::SisoLink;
use crate::linalg::frobenius;
use crate::{CMatrix, CRow, CVector, Complex64, Error, RMatrix, Result};

/// Search effort.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleBudget {
    /// Grid points per parameter for the exhaustive `N = 2` search.
    pub grid: usize,
    /// Random starting points for `N = 3`.
    pub multistarts: usize,
    /// Best candidates passed to local refinement.
    pub refine_top: usize,
    /// Refinement stops once the step is below this.
    pub min_step: f64,
    pub seed: u64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        Self {
            grid: 200,
            multistarts: 10_000,
            refine_top: 16,
            min_step: 1e-10,
            seed: 0x5eed,
        }
    }
}

/// Best value found and the matrix that attains it.
#[derive(Debug, Clone)]
pub struct OracleOutcome {
    /// Best normalized power `|ĥ_RI Θ ĥ_IT|²`.
    pub best: f64,
    pub theta: CMatrix,
    pub evaluations: u64,
}

/// Givens angles followed by phases: `N(N-1)/2 + N` parameters.
struct Objective {
    n: usize,
    r: CRow,
    t: CVector,
}

impl Objective {
    fn n_angles(&self) -> usize {
        self.n * (self.n - 1) / 2
    }

    fn n_params(&self) -> usize {
        self.n_angles() + self.n
    }

    fn orthogonal(&self, angles: &[f64]) -> RMatrix {
        let n = self.n;
        let mut o = RMatrix::identity(n, n);
        let mut k = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                let (s, c) = angles[k].sin_cos();
                let mut g = RMatrix::identity(n, n);
                g[(i, i)] = c;
                g[(j, j)] = c;
                g[(i, j)] = -s;
                g[(j, i)] = s;
                o *= g;
                k += 1;
            }
        }
        o
    }

    fn theta(&self, params: &[f64]) -> CMatrix {
        let o = self.orthogonal(&params[..self.n_angles()]);
        let oc = o.map(|x| Complex64::new(x, 0.0));
        let d = CMatrix::from_diagonal(&CVector::from_iterator(
            self.n,
            params[self.n_angles()..].iter().map(|&p| Complex64::from_polar(1.0, p)),
        ));
        &oc * d * oc.transpose()
    }

    fn value(&self, params: &[f64]) -> f64 {
        let theta = self.theta(params);
        (&self.r * theta * &self.t)[0].norm_sqr()
    }
}

fn refine(obj: &Objective, start: Vec<f64>, start_value: f64, step0: f64, min_step: f64) -> (Vec<f64>, f64, u64) {
    let mut x = start;
    let mut fx = start_value;
    let mut step = step0;
    let mut evals = 0u64;
    while step >= min_step {
        let mut improved = false;
        for k in 0..x.len() {
            for dir in [1.0, -1.0] {
                let mut y = x.clone();
                y[k] += dir * step;
                let fy = obj.value(&y);
                evals += 1;
                if fy > fx {
                    x = y;
                    fx = fy;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (x, fx, evals)
}

/// Maximizes `|ĥ_RI Θ ĥ_IT|²` over symmetric unitary `Θ` by search.
///
/// `N = 1` is solved by a phase grid, `N = 2` by an exhaustive
/// `grid³` sweep over `(φ, d₁, d₂)` and `N = 3` by random multistart; all
/// followed by coordinate refinement of the best candidates.
pub fn brute_force_optimum(link: &SisoLink, budget: &OracleBudget) -> Result<OracleOutcome> {
    let n = link.n_ris();
    if n == 0 || n > 3 {
        return Err(Error::UnsupportedSize {
            size: n,
            reason: "brute-force search supports 1 to 3 elements",
        });
    }
    let nr = frobenius(&link.h_ri);
    let nt = frobenius(&link.h_it);
    if nr == 0.0 || nt == 0.0 {
        return Err(Error::Degenerate("zero surface channel".into()));
    }
    let obj = Objective {
        n,
        r: link.h_ri.unscale(nr),
        t: link.h_it.unscale(nt),
    };

    let mut evaluations = 0u64;
    let grid = budget.grid.max(2);
    let candidates: Vec<(Vec<f64>, f64)> = match n {
        1 | 2 => {
            let per_param = if n == 1 { vec![TAU] } else { vec![PI, TAU, TAU] };
            let phasors: Vec<Complex64> = (0..grid)
                .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / grid as f64))
                .collect();
            let mut best: Vec<(Vec<f64>, f64)> = if n == 1 {
                let c = obj.r[0] * obj.t[0];
                (0..grid)
                    .map(|k| (vec![TAU * k as f64 / grid as f64], (c * phasors[k]).norm_sqr()))
                    .collect()
            } else {
                // One best point per rotation angle.
                (0..grid)
                    .into_par_iter()
                    .map(|i| {
                        let phi = per_param[0] * i as f64 / grid as f64;
                        let o = obj.orthogonal(&[phi]);
                        let oc = o.map(|x| Complex64::new(x, 0.0));
                        let a = &obj.r * &oc;
                        let b = oc.transpose() * &obj.t;
                        let (c1, c2) = (a[0] * b[0], a[1] * b[1]);
                        let mut top = (0, 0, f64::NEG_INFINITY);
                        for (j, p1) in phasors.iter().enumerate() {
                            let x = c1 * p1;
                            for (k, p2) in phasors.iter().enumerate() {
                                let v = (x + c2 * p2).norm_sqr();
                                if v > top.2 {
                                    top = (j, k, v);
                                }
                            }
                        }
                        let step = TAU / grid as f64;
                        (vec![phi, top.0 as f64 * step, top.1 as f64 * step], top.2)
                    })
                    .collect()
            };
            evaluations += (grid as u64).pow(if n == 1 { 1 } else { 3 });
            best.sort_by(|a, b| b.1.total_cmp(&a.1));
            best.truncate(budget.refine_top.max(1));
            best
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
            let starts: Vec<Vec<f64>> = (0..budget.multistarts.max(1))
                .map(|_| {
                    let mut p: Vec<f64> = (0..obj.n_angles()).map(|_| rng.random::<f64>() * PI).collect();
                    p.extend((0..n).map(|_| rng.random::<f64>() * TAU));
                    p
                })
                .collect();
            let mut scored: Vec<(Vec<f64>, f64)> = starts
                .into_par_iter()
                .map(|p| {
                    let v = obj.value(&p);
                    (p, v)
                })
                .collect();
            evaluations += scored.len() as u64;
            scored.sort_by(|a, b| b.1.total_cmp(&a.1));
            scored.truncate(budget.refine_top.max(1));
            scored
        }
    };

    let step0 = if n == 3 { 0.25 } else { TAU / grid as f64 };
    let refined: Vec<(Vec<f64>, f64, u64)> = candidates
        .into_par_iter()
        .map(|(p, v)| refine(&obj, p, v, step0, budget.min_step))
        .collect();
    let mut best: Option<(Vec<f64>, f64)> = None;
    for (p, v, e) in refined {
        evaluations += e;
        if best.as_ref().map_or(true, |b| v > b.1) {
            best = Some((p, v));
        }
    }
    let (params, value) = best.expect("at least one candidate");
    debug_assert_eq!(params.len(), obj.n_params());
    Ok(OracleOutcome {
        best: value,
        theta: obj.theta(&params),
        evaluations,
    })
}
