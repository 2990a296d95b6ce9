use crate::linalg::{frobenius, sym_eig_desc, EigenResult};
use crate::{CRow, CVector, Error, RMatrix, RVector, Result};

/// Relative cutoff below which an eigenvalue of `A` counts as zero.
pub const RANK_TOL: f64 = 1e-9;

/// Absolute floor below which eigenvalues of `A` are rounding noise. The
/// channels are normalized, so `‖A‖₂ ≤ 1` and this is a fixed scale.
pub const NOISE_FLOOR: f64 = 1e-12;

/// Magnitude at or below which a coefficient counts as zero.
pub fn zero_tolerance(delta: &RVector) -> f64 {
    (RANK_TOL * delta.amax()).max(NOISE_FLOOR)
}

/// The balancing quadratic form of one block.
#[derive(Debug, Clone)]
pub struct QuadFormSystem {
    /// `A = A_RI - A_IT`.
    pub a: RMatrix,
    /// Symmetric part of `ĥ_RIᴴ ĥ_RI`.
    pub a_ri: RMatrix,
    /// Symmetric part of `ĥ_IT ĥ_ITᴴ`.
    pub a_it: RMatrix,
    pub eig: EigenResult,
}

impl QuadFormSystem {
    /// Eigenvalues `δ` of `A`, descending.
    pub fn delta(&self) -> &RVector {
        &self.eig.eigenvalues
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }
}

pub(crate) fn unit_row(v: &CRow, what: &str) -> Result<CRow> {
    let norm = frobenius(v);
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::Degenerate(format!("{what} has zero or non-finite norm")));
    }
    Ok(v.unscale(norm))
}

pub(crate) fn unit_col(v: &CVector, what: &str) -> Result<CVector> {
    let norm = frobenius(v);
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::Degenerate(format!("{what} has zero or non-finite norm")));
    }
    Ok(v.unscale(norm))
}

/// Builds `A` from the (re-normalized) channels and eigen-decomposes it.
pub fn build_quadform(h_ri: &CRow, h_it: &CVector) -> Result<QuadFormSystem> {
    if h_ri.len() != h_it.len() {
        return Err(Error::DimensionMismatch(format!(
            "h_RI has {} entries, h_IT has {}",
            h_ri.len(),
            h_it.len()
        )));
    }
    let r = unit_row(h_ri, "h_RI")?;
    let t = unit_col(h_it, "h_IT")?;
    debug_assert!((frobenius(&r) - 1.0).abs() < 1e-12);
    let n = r.len();
    // (R + Rᵀ)/2 of a Hermitian outer product is its real part.
    let a_ri = RMatrix::from_fn(n, n, |i, j| (r[i].conj() * r[j]).re);
    let a_it = RMatrix::from_fn(n, n, |i, j| (t[i] * t[j].conj()).re);
    let a = &a_ri - &a_it;
    let eig = sym_eig_desc(&a)?;
    Ok(QuadFormSystem { a, a_ri, a_it, eig })
}
