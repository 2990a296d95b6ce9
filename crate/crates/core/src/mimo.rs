//! Single-user MIMO design.
//!
//! Without a direct link the fully connected optimum is closed form: align
//! the surface with the dominant right singular vector of `H_RI` and the
//! dominant left singular vector of `H_IT`. With a direct link the surface
//! and the beamformers are optimized alternately; each half-step is optimal
//! given the other, so the objective never decreases.

use crate::channel::ChannelSet;
use crate::design::ScatteringDesigner;
use crate::linalg::{dominant_svd, frobenius, spectral_norm};
use crate::synth::{synthesize_block, upper_bounds, ScatteringMatrix, SisoLink};
use crate::{CMatrix, CRow, CVector, Complex64, Error, Result};

/// Unit-norm precoder `w` (`N_T`) and combiner `g` (`1 × N_R`).
#[derive(Debug, Clone, PartialEq)]
pub struct BeamformingPair {
    pub w: CVector,
    pub g: CRow,
}

impl BeamformingPair {
    /// Pair from a dominant singular triplet of the end-to-end channel.
    fn from_svd(u: &CVector, v: &CVector) -> Self {
        Self {
            w: v.clone(),
            g: u.adjoint(),
        }
    }

    /// `e₁` on both sides.
    fn canonical(n_tx: usize, n_rx: usize) -> Self {
        let mut w = CVector::zeros(n_tx);
        w[0] = Complex64::new(1.0, 0.0);
        let mut g = CRow::zeros(n_rx);
        g[0] = Complex64::new(1.0, 0.0);
        Self { w, g }
    }
}

#[derive(Debug, Clone)]
pub struct DesignReport {
    pub theta: ScatteringMatrix,
    pub pair: BeamformingPair,
    /// Objective after every iteration, watts.
    pub power_trace: Vec<f64>,
    /// Applicable upper bound, watts.
    pub bound: f64,
    /// Power guaranteed by the initialization, watts.
    pub lower_bound: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl DesignReport {
    pub fn final_power(&self) -> f64 {
        self.power_trace.last().copied().unwrap_or(0.0)
    }
}

/// `P_T |g (H_RT + H_RI Θ H_IT) w|²`.
pub fn mimo_power(
    channels: &ChannelSet,
    theta: &ScatteringMatrix,
    pair: &BeamformingPair,
    tx_power: f64,
) -> Result<f64> {
    let h = end_to_end(channels, theta)?;
    Ok(tx_power * (&pair.g * h * &pair.w)[0].norm_sqr())
}

/// `H_RT + H_RI Θ H_IT`.
pub fn end_to_end(channels: &ChannelSet, theta: &ScatteringMatrix) -> Result<CMatrix> {
    Ok(&channels.h_rt + &channels.h_ri * theta.left_apply(&channels.h_it)?)
}

/// `|v_RIᴴ Θ u_IT|`; equals one exactly when the MIMO bound is met.
pub fn cosine_similarity(h_ri: &CMatrix, theta: &ScatteringMatrix, h_it: &CMatrix) -> Result<f64> {
    let v_ri = dominant_svd(h_ri)?.v;
    let u_it = dominant_svd(h_it)?.u;
    Ok(theta.cascade(&v_ri.adjoint(), &u_it)?.norm())
}

/// Fully connected optimum when the direct link is absent.
///
/// `H_RT` is ignored. The achieved power equals `P_T ‖H_RI‖² ‖H_IT‖²`.
pub fn design_fc_no_direct(h_ri: &CMatrix, h_it: &CMatrix, tx_power: f64) -> Result<DesignReport> {
    if h_ri.ncols() != h_it.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "H_RI has {} columns, H_IT has {} rows",
            h_ri.ncols(),
            h_it.nrows()
        )));
    }
    let ri = dominant_svd(h_ri)?;
    let it = dominant_svd(h_it)?;
    let block = synthesize_block(&ri.v.adjoint(), &it.u)?;
    let theta = ScatteringMatrix::from_blocks(vec![block])?;

    let cascade = h_ri * theta.left_apply(h_it)?;
    let top = dominant_svd(&cascade)?;
    let power = tx_power * top.sigma * top.sigma;
    let bound = tx_power * (ri.sigma * it.sigma).powi(2);
    Ok(DesignReport {
        theta,
        pair: BeamformingPair::from_svd(&top.u, &top.v),
        power_trace: vec![power],
        bound,
        lower_bound: bound,
        iterations: 1,
        converged: true,
    })
}

/// Which closed-form lower bound seeds the alternating design.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitChoice {
    /// Beamformers matched to the direct link.
    Direct,
    /// Beamformers matched to the surface channels.
    Reflected,
}

#[derive(Debug, Clone)]
pub struct InitBounds {
    pub direct: f64,
    pub reflected: f64,
    pub choice: InitChoice,
    pub pair: BeamformingPair,
}

impl InitBounds {
    pub fn best(&self) -> f64 {
        self.direct.max(self.reflected)
    }
}

/// Dominant singular pair, or `e₁` on both sides for an all-zero matrix.
fn dominant_or_canonical(m: &CMatrix) -> Result<BeamformingPair> {
    if m.iter().all(|z| z.norm_sqr() == 0.0) {
        return Ok(BeamformingPair::canonical(m.ncols(), m.nrows()));
    }
    let s = dominant_svd(m)?;
    Ok(BeamformingPair::from_svd(&s.u, &s.v))
}

/// Effective single-antenna link seen through `(g, w)`.
pub fn effective_link(channels: &ChannelSet, pair: &BeamformingPair) -> SisoLink {
    SisoLink {
        h_rt: (&pair.g * &channels.h_rt * &pair.w)[0],
        h_ri: &pair.g * &channels.h_ri,
        h_it: &channels.h_it * &pair.w,
    }
}

/// The two closed-form lower bounds and the initial beamformers.
///
/// Each bound is the group connected optimum of the effective link seen by
/// one candidate pair: the dominant singular vectors of `H_RT` for the
/// direct bound, and the left vector of `H_RI` with the right vector of
/// `H_IT` for the reflected one. An all-zero `H_RT` has no dominant pair and
/// `e₁` is used instead.
pub fn init_lower_bounds(channels: &ChannelSet, group_size: usize, tx_power: f64) -> Result<InitBounds> {
    let dir_pair = dominant_or_canonical(&channels.h_rt)?;
    let ri = dominant_or_canonical(&channels.h_ri)?;
    let it = dominant_or_canonical(&channels.h_it)?;
    let refl_pair = BeamformingPair { w: it.w, g: ri.g };

    let direct = upper_bounds(&effective_link(channels, &dir_pair), group_size, tx_power)?.group;
    let reflected = upper_bounds(&effective_link(channels, &refl_pair), group_size, tx_power)?.group;
    let (choice, pair) = if direct >= reflected {
        (InitChoice::Direct, dir_pair)
    } else {
        (InitChoice::Reflected, refl_pair)
    };
    Ok(InitBounds {
        direct,
        reflected,
        choice,
        pair,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlternatingOptions {
    /// Stop once the fractional increase falls below this.
    pub epsilon: f64,
    pub max_iters: usize,
}

impl Default for AlternatingOptions {
    fn default() -> Self {
        Self {
            epsilon: 1e-6,
            max_iters: 100,
        }
    }
}

/// `P_T (‖H_RT‖ + ‖H_RI‖ ‖H_IT‖)²`.
pub fn global_upper_bound(channels: &ChannelSet, tx_power: f64) -> Result<f64> {
    let s = spectral_norm(&channels.h_rt)? + spectral_norm(&channels.h_ri)? * spectral_norm(&channels.h_it)?;
    Ok(tx_power * s * s)
}

/// Alternating optimization of `Θ` and `(w, g)`.
///
/// Running out of iterations is not an error; the report then has
/// `converged = false`.
pub fn alternating_design(
    channels: &ChannelSet,
    designer: &dyn ScatteringDesigner,
    tx_power: f64,
    options: AlternatingOptions,
) -> Result<DesignReport> {
    if !(options.epsilon > 0.0) {
        return Err(Error::InvalidInput(format!("epsilon {} must be positive", options.epsilon)));
    }
    if options.max_iters == 0 {
        return Err(Error::InvalidInput("max_iters must be at least 1".into()));
    }
    if frobenius(&channels.h_ri) == 0.0 && frobenius(&channels.h_rt) == 0.0 {
        return Err(Error::Degenerate("all channels are zero".into()));
    }
    let group_size = designer.group_size(channels.n_ris())?;
    let init = init_lower_bounds(channels, group_size, tx_power)?;
    let mut pair = init.pair.clone();
    let mut trace = Vec::with_capacity(options.max_iters);
    let mut previous = init.best();
    let mut converged = false;
    let mut theta = None;

    for _ in 0..options.max_iters {
        let t = designer.design(&effective_link(channels, &pair))?;
        let h = end_to_end(channels, &t)?;
        let top = dominant_svd(&h)?;
        pair = BeamformingPair::from_svd(&top.u, &top.v);
        let power = tx_power * top.sigma * top.sigma;
        trace.push(power);
        theta = Some(t);
        let done = previous > 0.0 && (power - previous) / previous < options.epsilon;
        previous = power;
        if done {
            converged = true;
            break;
        }
    }

    Ok(DesignReport {
        theta: theta.expect("at least one iteration"),
        pair,
        iterations: trace.len(),
        power_trace: trace,
        bound: global_upper_bound(channels, tx_power)?,
        lower_bound: init.best(),
        converged,
    })
}
