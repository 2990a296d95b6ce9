//! Dense linear-algebra kernels.
//!
//! Thin wrappers over `nalgebra` that fix the conventions the rest of the
//! crate depends on: eigenvalues sorted in decreasing order, dominant
//! singular pairs with a pinned phase, and explicit errors on non-finite or
//! degenerate input.

use nalgebra::{SymmetricEigen, SVD};

use crate::{CMatrix, CVector, Complex64, Error, RMatrix, RVector, Result};

/// Eigen-decomposition of a real symmetric matrix.
#[derive(Debug, Clone)]
pub struct EigenResult {
    /// Eigenvalues in non-increasing order.
    pub eigenvalues: RVector,
    /// Orthonormal eigenvectors, column `i` paired with `eigenvalues[i]`.
    pub eigenvectors: RMatrix,
}

impl EigenResult {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `U diag(λ) Uᵀ`.
    pub fn reconstruct(&self) -> RMatrix {
        let scaled = &self.eigenvectors * RMatrix::from_diagonal(&self.eigenvalues);
        scaled * self.eigenvectors.transpose()
    }
}

/// Dominant singular triplet `(σ, u, v)` with `M v = σ u`.
#[derive(Debug, Clone)]
pub struct SvdTriplet {
    pub sigma: f64,
    pub u: CVector,
    pub v: CVector,
}

fn ensure_finite_real(m: &RMatrix) -> Result<()> {
    if m.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidInput("matrix has non-finite entries".into()))
    }
}

fn ensure_finite_complex(m: &CMatrix) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidInput("matrix has non-finite entries".into()))
    }
}

/// Eigen-decomposition of a real symmetric matrix, eigenvalues descending.
///
/// The input is symmetrized as `(M + Mᵀ)/2` first. Equal eigenvalues keep
/// the backend's relative order.
pub fn sym_eig_desc(m: &RMatrix) -> Result<EigenResult> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigen-decomposition needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    ensure_finite_real(m)?;
    let n = m.nrows();
    if n == 0 {
        return Ok(EigenResult {
            eigenvalues: RVector::zeros(0),
            eigenvectors: RMatrix::zeros(0, 0),
        });
    }
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let eigenvalues = RVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut eigenvectors = RMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(EigenResult {
        eigenvalues,
        eigenvectors,
    })
}

/// Rotates `v` so that its first non-negligible entry is real and positive.
///
/// Returns the unit-modulus factor that was applied.
pub fn pin_phase(v: &mut CVector) -> Complex64 {
    let peak = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let threshold = 1e-10 * peak;
    let lead = v
        .iter()
        .find(|z| z.norm() > threshold)
        .copied()
        .unwrap_or(Complex64::new(1.0, 0.0));
    let factor = lead.conj() / lead.norm();
    v.iter_mut().for_each(|z| *z *= factor);
    factor
}

/// Largest singular value with its left and right singular vectors.
///
/// The right vector `v` is phase-pinned (see [`pin_phase`]) and `u` carries
/// the matching phase, so `M v = σ u` holds. Callers must not rely on any
/// other phase convention.
pub fn dominant_svd(m: &CMatrix) -> Result<SvdTriplet> {
    ensure_finite_complex(m)?;
    if m.is_empty() || m.iter().all(|z| z.norm_sqr() == 0.0) {
        return Err(Error::Degenerate(
            "dominant singular vectors of an all-zero matrix are undefined".into(),
        ));
    }
    let svd = SVD::new(m.clone(), true, true);
    let (idx, sigma) = svd
        .singular_values
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, s)| {
            if s > best.1 {
                (i, s)
            } else {
                best
            }
        });
    let u_all = svd.u.as_ref().expect("left vectors requested");
    let v_t = svd.v_t.as_ref().expect("right vectors requested");

    let mut v: CVector = v_t.row(idx).adjoint();
    let mut u: CVector = u_all.column(idx).into_owned();
    let factor = pin_phase(&mut v);
    u *= factor;
    Ok(SvdTriplet { sigma, u, v })
}

/// Spectral norm `‖M‖₂`, zero for an all-zero matrix.
pub fn spectral_norm(m: &CMatrix) -> Result<f64> {
    ensure_finite_complex(m)?;
    if m.is_empty() || m.iter().all(|z| z.norm_sqr() == 0.0) {
        return Ok(0.0);
    }
    Ok(dominant_svd(m)?.sigma)
}

/// Euclidean norm of a complex vector or matrix viewed as a vector.
pub(crate) fn frobenius<R: nalgebra::Dim, C: nalgebra::Dim, S>(
    m: &nalgebra::Matrix<Complex64, R, C, S>,
) -> f64
where
    S: nalgebra::RawStorage<Complex64, R, C>,
{
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
