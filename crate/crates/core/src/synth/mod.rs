//! Closed-form synthesis of globally optimal symmetric unitary scattering
//! matrices for single-antenna links.
//!
//! For a block with channels `h_RI` (row) and `h_IT` (column), the
//! normalized gain `|ĥ_RI Θ ĥ_IT|` never exceeds one. Writing
//! `Θ = V D Vᵀ` with `V` real orthonormal and `D` a diagonal of phases, the
//! bound is met iff every column `v` of `V` balances `|ĥ_RI v| = |vᵀ ĥ_IT|`,
//! i.e. `vᵀ A v = 0` for the real symmetric, traceless matrix
//! `A = Re(ĥ_RIᴴ ĥ_RI) - Re(ĥ_IT ĥ_ITᴴ)`. In the eigenbasis of `A` this is a
//! diagonal quadratic form with at most two positive and two negative
//! coefficients, and [`isotropic_basis`] writes down an orthonormal basis of
//! solutions in closed form.

mod basis;
mod block;
mod bounds;
mod props;
mod quadform;
mod scattering;

pub use basis::isotropic_basis;
pub use block::{synthesize_block, synthesize_group, DEPENDENCE_TOL};
pub use bounds::{received_power, upper_bounds, PowerBounds};
pub use props::{verify_propositions, PropositionReport, SignPattern};
pub use quadform::{build_quadform, zero_tolerance, QuadFormSystem, NOISE_FLOOR, RANK_TOL};
pub use scattering::{ConstraintResidual, ScatteringMatrix};

use crate::{CRow, CVector, Complex64};

/// Single-antenna link: direct scalar plus the two surface channels.
#[derive(Debug, Clone, PartialEq)]
pub struct SisoLink {
    pub h_rt: Complex64,
    /// Surface to receiver, `1 × N_I`.
    pub h_ri: CRow,
    /// Transmitter to surface, `N_I × 1`.
    pub h_it: CVector,
}

impl SisoLink {
    pub fn new(h_rt: Complex64, h_ri: CRow, h_it: CVector) -> crate::Result<Self> {
        if h_ri.len() != h_it.len() {
            return Err(crate::Error::DimensionMismatch(format!(
                "h_RI has {} entries, h_IT has {}",
                h_ri.len(),
                h_it.len()
            )));
        }
        Ok(Self { h_rt, h_ri, h_it })
    }

    pub fn n_ris(&self) -> usize {
        self.h_it.len()
    }
}

/// `arg(z)` with `arg(0) = 0`.
pub(crate) fn arg0(z: Complex64) -> f64 {
    if z.norm_sqr() == 0.0 {
        0.0
    } else {
        z.arg()
    }
}
