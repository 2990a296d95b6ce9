use super::{ScatteringMatrix, SisoLink};
use crate::linalg::frobenius;
use crate::{Error, Result};

/// `P_T |h_RT + h_RI Θ h_IT|²`.
pub fn received_power(link: &SisoLink, theta: &ScatteringMatrix, tx_power: f64) -> Result<f64> {
    let total = link.h_rt + theta.cascade(&link.h_ri, &link.h_it)?;
    Ok(tx_power * total.norm_sqr())
}

/// Received-power upper bounds of the three architectures on one link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerBounds {
    /// `P_T (|h_RT| + Σ_n |h_RI,n h_IT,n|)²`.
    pub single: f64,
    /// `P_T (|h_RT| + Σ_g ‖h_RI,g‖ ‖h_IT,g‖)²` for the requested group size.
    pub group: f64,
    /// `P_T (|h_RT| + ‖h_RI‖ ‖h_IT‖)²`.
    pub fully: f64,
}

/// Sum of per-group norm products `Σ_g ‖h_RI,g‖ ‖h_IT,g‖`.
pub(crate) fn grouped_norm_product(link: &SisoLink, group_size: usize) -> Result<f64> {
    let n = link.n_ris();
    if link.h_ri.len() != n || group_size == 0 || n % group_size != 0 {
        return Err(Error::DimensionMismatch(format!(
            "group size {group_size} does not divide {n} elements"
        )));
    }
    Ok((0..n / group_size)
        .map(|g| {
            frobenius(&link.h_ri.columns(g * group_size, group_size))
                * frobenius(&link.h_it.rows(g * group_size, group_size))
        })
        .sum())
}

pub fn upper_bounds(link: &SisoLink, group_size: usize, tx_power: f64) -> Result<PowerBounds> {
    let direct = link.h_rt.norm();
    let bound = |s: f64| tx_power * (direct + s).powi(2);
    Ok(PowerBounds {
        single: bound(grouped_norm_product(link, 1)?),
        group: bound(grouped_norm_product(link, group_size)?),
        fully: bound(grouped_norm_product(link, link.n_ris())?),
    })
}
