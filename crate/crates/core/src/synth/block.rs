use super::basis::isotropic_basis;
use super::quadform::{build_quadform, unit_col, unit_row};
use super::{arg0, ScatteringMatrix, SisoLink};
use crate::linalg::frobenius;
use crate::{CMatrix, CRow, CVector, Complex64, Error, RMatrix, Result};

/// Channels whose normalized inner product reaches `1 - DEPENDENCE_TOL` in
/// modulus are treated as linearly dependent.
pub const DEPENDENCE_TOL: f64 = 1e-9;

/// `U T`, skipping the structural zeros of `T`.
fn sparse_product(u: &RMatrix, t: &RMatrix) -> RMatrix {
    let n = u.nrows();
    let mut v = RMatrix::zeros(n, t.ncols());
    for j in 0..t.ncols() {
        for i in 0..t.nrows() {
            let w = t[(i, j)];
            if w != 0.0 {
                v.column_mut(j).axpy(w, &u.column(i), 1.0);
            }
        }
    }
    v
}

/// `x V` for a complex row and a real matrix.
fn row_times_real(x: &CRow, v: &RMatrix) -> CRow {
    let re = x.map(|z| z.re) * v;
    let im = x.map(|z| z.im) * v;
    CRow::from_fn(v.ncols(), |_, j| Complex64::new(re[j], im[j]))
}

/// The optimal symmetric unitary block `Θ̄` for one pair of channels.
///
/// After synthesis `ĥ_RI Θ̄ ĥ_IT` is real, non-negative and equal to one up
/// to rounding, i.e. `|h_RI Θ̄ h_IT| = ‖h_RI‖ ‖h_IT‖`.
pub fn synthesize_block(h_ri: &CRow, h_it: &CVector) -> Result<CMatrix> {
    if h_ri.len() != h_it.len() {
        return Err(Error::DimensionMismatch(format!(
            "h_RI has {} entries, h_IT has {}",
            h_ri.len(),
            h_it.len()
        )));
    }
    let n = h_ri.len();
    if n == 0 {
        return Err(Error::InvalidInput("empty channel".into()));
    }
    let r = unit_row(h_ri, "h_RI")?;
    let t = unit_col(h_it, "h_IT")?;

    let alignment: Complex64 = r.iter().zip(t.iter()).map(|(a, b)| a * b.conj()).sum();
    let v = if alignment.norm() >= 1.0 - DEPENDENCE_TOL {
        RMatrix::identity(n, n)
    } else {
        let qf = build_quadform(&r, &t)?;
        let basis = isotropic_basis(qf.delta())?;
        sparse_product(&qf.eig.eigenvectors, &basis)
    };

    let a = row_times_real(&r, &v);
    let b = row_times_real(&t.transpose(), &v);
    let phases: Vec<f64> = a
        .iter()
        .zip(b.iter())
        .map(|(x, y)| -arg0(*x) - arg0(*y))
        .collect();

    let mut vc = v.clone();
    let mut vs = v.clone();
    for (j, d) in phases.iter().enumerate() {
        vc.column_mut(j).scale_mut(d.cos());
        vs.column_mut(j).scale_mut(d.sin());
    }
    let vt = v.transpose();
    let re = vc * &vt;
    let im = vs * &vt;
    Ok(CMatrix::from_fn(n, n, |i, j| Complex64::new(re[(i, j)], im[(i, j)])))
}

/// Group connected design: one optimal block per group, then every block
/// is rotated by `e^{j arg(h_RT)}` so the reflected path adds in phase with
/// the direct one.
///
/// A group whose truncated channel vanishes on either side contributes
/// nothing whatever its block is, and gets the identity.
pub fn synthesize_group(link: &SisoLink, group_size: usize) -> Result<ScatteringMatrix> {
    let n = link.h_ri.len();
    if link.h_it.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "h_RI has {n} entries, h_IT has {}",
            link.h_it.len()
        )));
    }
    if group_size == 0 || n == 0 || n % group_size != 0 {
        return Err(Error::DimensionMismatch(format!(
            "group size {group_size} does not divide {n} elements"
        )));
    }
    let blocks = (0..n / group_size)
        .map(|g| {
            let r: CRow = link.h_ri.columns(g * group_size, group_size).into_owned();
            let t: CVector = link.h_it.rows(g * group_size, group_size).into_owned();
            if frobenius(&r) == 0.0 || frobenius(&t) == 0.0 {
                Ok(CMatrix::identity(group_size, group_size))
            } else {
                synthesize_block(&r, &t)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let mut theta = ScatteringMatrix::from_blocks(blocks)?;
    theta.rotate(Complex64::from_polar(1.0, arg0(link.h_rt)));
    Ok(theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn draw(n: usize, seed: u64) -> (CRow, CVector) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut z = || {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(re, im)
        };
        (CRow::from_fn(n, |_, _| z()), CVector::from_fn(n, |_, _| z()))
    }

    fn normalized_gain(r: &CRow, t: &CVector, theta: &CMatrix) -> Complex64 {
        (r * theta * t)[0] / (frobenius(r) * frobenius(t))
    }

    #[test]
    fn single_element_is_phase_conjugation() {
        let r = CRow::from_element(1, Complex64::from_polar(0.3, 1.1));
        let t = CVector::from_element(1, Complex64::from_polar(2.0, -0.4));
        let theta = synthesize_block(&r, &t).unwrap();
        let expected = Complex64::from_polar(1.0, -1.1 + 0.4);
        assert!((theta[(0, 0)] - expected).norm() < 1e-15);
    }

    #[test]
    fn dependent_channels_give_diagonal_block() {
        let (r, _) = draw(5, 1);
        let t: CVector = r.transpose() * Complex64::new(-0.7, 0.2);
        let theta = synthesize_block(&r, &t).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                if i != j {
                    assert_eq!(theta[(i, j)], Complex64::new(0.0, 0.0));
                }
            }
        }
        assert!((normalized_gain(&r, &t, &theta) - 1.0).norm() < 1e-12);
    }

    #[test]
    fn random_eight_meets_cauchy_schwarz() {
        let (r, t) = draw(8, 2);
        let theta = synthesize_block(&r, &t).unwrap();
        let g = normalized_gain(&r, &t, &theta);
        assert!((g.norm() - 1.0).abs() < 1e-10);
        assert!(g.im.abs() < 1e-10 && g.re > 0.0);
    }

    #[test]
    fn zero_channel_errors() {
        let (r, _) = draw(3, 3);
        assert!(matches!(
            synthesize_block(&r, &CVector::zeros(3)),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn group_without_direct_link_reaches_one() {
        let (r, t) = draw(6, 4);
        let link = SisoLink::new(Complex64::new(0.0, 0.0), r.unscale(frobenius(&r)), t.unscale(frobenius(&t))).unwrap();
        let theta = synthesize_group(&link, 6).unwrap();
        let g = theta.cascade(&link.h_ri, &link.h_it).unwrap();
        assert!((g.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn bad_group_size_errors() {
        let (r, t) = draw(6, 5);
        let link = SisoLink::new(Complex64::new(1.0, 0.0), r, t).unwrap();
        assert!(synthesize_group(&link, 4).is_err());
        assert!(synthesize_group(&link, 0).is_err());
    }
}
