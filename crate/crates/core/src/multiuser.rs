//! Weighted sum-power maximization for multi-user MISO.
//!
//! Stacking the user channels row-wise, each scaled by `√α_k`, turns the
//! weighted sum power into `P_T ‖H w‖²` with
//! `H = G_RT + G_RI Θ H_IT`. A single stream along the dominant right
//! singular vector of `H` is then optimal, and the problem reduces to the
//! single-user MIMO design with `G_RT, G_RI` in place of `H_RT, H_RI`.

use crate::channel::ChannelSet;
use crate::design::ScatteringDesigner;
use crate::linalg::{dominant_svd, frobenius};
use crate::mimo::{alternating_design, AlternatingOptions, DesignReport};
use crate::synth::{synthesize_block, ScatteringMatrix};
use crate::{CMatrix, CVector, Complex64, Error, Result};

/// Weighted, stacked channels.
#[derive(Debug, Clone, PartialEq)]
pub struct StackedSystem {
    /// `K × N_T`, row `k` is `√α_k h_RT,k`.
    pub g_rt: CMatrix,
    /// `K × N_I`, row `k` is `√α_k h_RI,k`.
    pub g_ri: CMatrix,
    pub h_it: CMatrix,
    pub weights: Vec<f64>,
}

/// Scales row `k` of the per-user channels by `√α_k`.
///
/// `channels.h_rt` and `channels.h_ri` hold one row per user.
pub fn stack_weighted(channels: &ChannelSet, weights: &[f64]) -> Result<StackedSystem> {
    let k = channels.h_rt.nrows();
    if weights.len() != k {
        return Err(Error::DimensionMismatch(format!(
            "{} weights for {k} users",
            weights.len()
        )));
    }
    if let Some(w) = weights.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
        return Err(Error::InvalidInput(format!("user weight {w} must be positive")));
    }
    let scale = |m: &CMatrix| {
        let mut out = m.clone();
        for (i, w) in weights.iter().enumerate() {
            out.row_mut(i).scale_mut(w.sqrt());
        }
        out
    };
    Ok(StackedSystem {
        g_rt: scale(&channels.h_rt),
        g_ri: scale(&channels.h_ri),
        h_it: channels.h_it.clone(),
        weights: weights.to_vec(),
    })
}

impl StackedSystem {
    pub fn n_users(&self) -> usize {
        self.g_rt.nrows()
    }

    /// `H = G_RT + G_RI Θ H_IT`.
    pub fn effective(&self, theta: &ScatteringMatrix) -> Result<CMatrix> {
        Ok(&self.g_rt + &self.g_ri * theta.left_apply(&self.h_it)?)
    }

    fn as_channels(&self) -> Result<ChannelSet> {
        ChannelSet::new(self.g_rt.clone(), self.g_ri.clone(), self.h_it.clone())
    }
}

/// Dominant right singular vector of `H`, phase-pinned.
pub fn optimal_precoder(system: &StackedSystem, theta: &ScatteringMatrix) -> Result<CVector> {
    Ok(dominant_svd(&system.effective(theta)?)?.v)
}

/// Received power of every user, `P_T Σ_j |h_k w_j|²`, unweighted.
pub fn per_user_powers(
    system: &StackedSystem,
    theta: &ScatteringMatrix,
    precoders: &[CVector],
    tx_power: f64,
) -> Result<Vec<f64>> {
    check_precoders(precoders, system.h_it.ncols())?;
    let h = system.effective(theta)?;
    Ok((0..system.n_users())
        .map(|k| {
            let row = h.row(k);
            let p: f64 = precoders.iter().map(|w| (row * w)[0].norm_sqr()).sum();
            tx_power * p / system.weights[k]
        })
        .collect())
}

/// `Σ_k α_k P_R,k`.
pub fn weighted_sum_power(
    system: &StackedSystem,
    theta: &ScatteringMatrix,
    precoders: &[CVector],
    tx_power: f64,
) -> Result<f64> {
    Ok(per_user_powers(system, theta, precoders, tx_power)?
        .iter()
        .zip(&system.weights)
        .map(|(p, a)| a * p)
        .sum())
}

fn check_precoders(precoders: &[CVector], n_tx: usize) -> Result<()> {
    if precoders.iter().any(|w| w.len() != n_tx) {
        return Err(Error::DimensionMismatch(format!("precoders must have {n_tx} entries")));
    }
    let total: f64 = precoders.iter().map(|w| w.norm_squared()).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidInput(format!(
            "precoder power {total} must equal one"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct MuDesign {
    pub theta: ScatteringMatrix,
    pub precoder: CVector,
    /// Weighted sum power, watts.
    pub sum_power: f64,
    /// `P_T ‖G_RI‖² ‖H_IT‖²`.
    pub bound: f64,
}

/// Fully connected optimum without direct links; `G_RT` is ignored.
pub fn design_fc_no_direct_mu(system: &StackedSystem, tx_power: f64) -> Result<MuDesign> {
    if frobenius(&system.g_ri) == 0.0 || frobenius(&system.h_it) == 0.0 {
        return Err(Error::Degenerate("zero surface channel".into()));
    }
    let ri = dominant_svd(&system.g_ri)?;
    let it = dominant_svd(&system.h_it)?;
    let theta = ScatteringMatrix::from_blocks(vec![synthesize_block(&ri.v.adjoint(), &it.u)?])?;
    let h = &system.g_ri * theta.left_apply(&system.h_it)?;
    let top = dominant_svd(&h)?;
    Ok(MuDesign {
        theta,
        precoder: top.v,
        sum_power: tx_power * top.sigma * top.sigma,
        bound: tx_power * (ri.sigma * it.sigma).powi(2),
    })
}

/// Alternating design on the stacked system. The last trace entry is the
/// weighted sum power `P_T ‖H‖²` and `pair.w` the optimal precoder.
pub fn design_general_mu(
    system: &StackedSystem,
    designer: &dyn ScatteringDesigner,
    tx_power: f64,
    options: AlternatingOptions,
) -> Result<DesignReport> {
    alternating_design(&system.as_channels()?, designer, tx_power, options)
}

/// Unit vector along `v`; used for matched filters in tests and examples.
pub fn unit(v: &CVector) -> Result<CVector> {
    let n = frobenius(v);
    if n == 0.0 {
        return Err(Error::Degenerate("zero vector".into()));
    }
    Ok(v.map(|z| z / Complex64::new(n, 0.0)))
}
