use super::quadform::{zero_tolerance, QuadFormSystem};
use crate::linalg::sym_eig_desc;
use crate::Result;

/// Counts of positive, negative and (numerically) zero eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SignPattern {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

/// Structural facts about `A` that the closed-form basis relies on.
#[derive(Debug, Clone, PartialEq)]
pub struct PropositionReport {
    pub dim: usize,
    pub rank: usize,
    pub expected_rank: usize,
    /// `|tr A|`.
    pub trace_residual: f64,
    pub sign_pattern: SignPattern,
    /// `N ≥ 4`: `δ₁, δ₂ > 0` and `δ_{N-1}, δ_N < 0`; for `N > 4` also
    /// `δ₃ = δ_{N-2} = 0`. Always true below four elements.
    pub sign_ok: bool,
    /// For `N > 4`: `A_RI`, `A_IT` are PSD of rank ≤ 2 and the Weyl bounds
    /// on `δ₃` and `δ_{N-2}` hold and collapse to zero. True otherwise.
    pub weyl_ok: bool,
    /// `det A > 0`, only evaluated for `N = 4`.
    pub det_positive: Option<bool>,
}

impl PropositionReport {
    pub fn passed(&self, trace_tol: f64) -> bool {
        self.rank == self.expected_rank
            && self.trace_residual <= trace_tol
            && self.sign_ok
            && self.weyl_ok
            && self.det_positive.unwrap_or(true)
    }
}

/// Checks rank, trace, sign pattern and the Weyl-type eigenvalue bounds
/// of `A`, for channels assumed generic (linearly independent, complex).
pub fn verify_propositions(qf: &QuadFormSystem) -> Result<PropositionReport> {
    let delta = qf.delta();
    let n = delta.len();
    let tol = zero_tolerance(delta);

    let mut pattern = SignPattern::default();
    for &d in delta.iter() {
        if d > tol {
            pattern.positive += 1;
        } else if d < -tol {
            pattern.negative += 1;
        } else {
            pattern.zero += 1;
        }
    }
    let rank = pattern.positive + pattern.negative;
    let expected_rank = if n < 2 { 0 } else { n.min(4) };

    let sign_ok = if n >= 4 {
        let outer = delta[0] > tol && delta[1] > tol && delta[n - 2] < -tol && delta[n - 1] < -tol;
        let inner = n == 4 || (delta[2].abs() <= tol && delta[n - 3].abs() <= tol);
        outer && inner
    } else {
        true
    };

    let weyl_ok = if n > 4 {
        let ri = sym_eig_desc(&qf.a_ri)?.eigenvalues;
        let it = sym_eig_desc(&qf.a_it)?.eigenvalues;
        let psd_rank2 = |e: &crate::RVector| e.iter().all(|&x| x >= -tol) && e.iter().skip(2).all(|x| x.abs() <= tol);
        // 0-based: δ₃ = delta[2], δ_{N-2} = delta[n-3].
        let d3_upper = ri[2] - it[n - 1];
        let d3_lower = ri[n - 1] - it[n - 3];
        let dn2_upper = ri[2] - it[4];
        let dn2_lower = ri[n - 1] - it[2];
        let bounds = [d3_upper, d3_lower, dn2_upper, dn2_lower];
        psd_rank2(&ri)
            && psd_rank2(&it)
            && delta[2] <= d3_upper + tol
            && delta[2] >= d3_lower - tol
            && delta[n - 3] <= dn2_upper + tol
            && delta[n - 3] >= dn2_lower - tol
            && bounds.iter().all(|b| b.abs() <= tol)
    } else {
        true
    };

    let det_positive = (n == 4).then(|| delta.iter().product::<f64>() > 0.0);

    Ok(PropositionReport {
        dim: n,
        rank,
        expected_rank,
        trace_residual: qf.a.trace().abs().max(delta.sum().abs()),
        sign_pattern: pattern,
        sign_ok,
        weyl_ok,
        det_positive,
    })
}
