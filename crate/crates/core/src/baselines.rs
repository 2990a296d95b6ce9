//! Reference designs that do not go through the eigen-based synthesis.

use crate::linalg::frobenius;
use crate::synth::{ScatteringMatrix, SisoLink};
use crate::{CMatrix, Complex64, Error, RMatrix, Result};

/// Lossless reciprocal impedance network `Z = jX`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReactanceNetwork {
    /// Real symmetric reactance matrix, ohms.
    pub reactance: RMatrix,
    /// Reference impedance, ohms.
    pub z0: f64,
}

impl ReactanceNetwork {
    pub const DEFAULT_Z0: f64 = 50.0;

    pub fn new(reactance: RMatrix) -> Self {
        Self {
            reactance,
            z0: Self::DEFAULT_Z0,
        }
    }
}

/// `Θ = (jX + Z0 I)⁻¹ (jX − Z0 I)`.
pub fn reactance_to_scattering(net: &ReactanceNetwork) -> Result<CMatrix> {
    let x = &net.reactance;
    if !x.is_square() {
        return Err(Error::DimensionMismatch("reactance matrix must be square".into()));
    }
    if !(net.z0 > 0.0) {
        return Err(Error::InvalidInput(format!("reference impedance {} must be positive", net.z0)));
    }
    let n = x.nrows();
    let jx = x.map(|v| Complex64::new(0.0, v));
    let z0 = CMatrix::identity(n, n) * Complex64::new(net.z0, 0.0);
    let lhs = &jx + &z0;
    let rhs = &jx - &z0;
    lhs.lu()
        .solve(&rhs)
        .ok_or_else(|| Error::InternalConsistency("jX + Z0 I is singular".into()))
}

/// Optimal diagonal (single connected) design and its received power.
#[derive(Debug, Clone)]
pub struct SingleConnectedDesign {
    pub theta: ScatteringMatrix,
    pub power: f64,
}

/// Per-element phase conjugation `θ_n = −arg(h_RI,n) − arg(h_IT,n)`, then the
/// common rotation onto `arg(h_RT)`.
pub fn single_connected_design(link: &SisoLink, tx_power: f64) -> Result<SingleConnectedDesign> {
    let n = link.n_ris();
    if link.h_ri.len() != n || n == 0 {
        return Err(Error::DimensionMismatch("channel lengths differ or are empty".into()));
    }
    if frobenius(&link.h_ri) == 0.0 || frobenius(&link.h_it) == 0.0 {
        return Err(Error::Degenerate("zero surface channel".into()));
    }
    let lift = arg_or_zero(link.h_rt);
    let phases: Vec<f64> = link
        .h_ri
        .iter()
        .zip(link.h_it.iter())
        .map(|(r, t)| lift - arg_or_zero(*r) - arg_or_zero(*t))
        .collect();
    let theta = ScatteringMatrix::diagonal(&phases)?;
    let reflected: f64 = link
        .h_ri
        .iter()
        .zip(link.h_it.iter())
        .map(|(r, t)| (r * t).norm())
        .sum();
    let power = tx_power * (link.h_rt.norm() + reflected).powi(2);
    Ok(SingleConnectedDesign { theta, power })
}

fn arg_or_zero(z: Complex64) -> f64 {
    if z.norm_sqr() == 0.0 {
        0.0
    } else {
        z.arg()
    }
}

/// Received power without any surface, `P_T |h_RT|²`.
pub fn no_ris_power(h_rt: Complex64, tx_power: f64) -> f64 {
    tx_power * h_rt.norm_sqr()
}
