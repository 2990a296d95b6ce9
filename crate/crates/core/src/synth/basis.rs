use std::f64::consts::FRAC_1_SQRT_2;

use super::quadform::zero_tolerance;
use crate::{Error, RMatrix, RVector, Result};

/// Orthonormal basis `T` whose every column `t` satisfies
/// `Σ δ_i t_i² = 0`, for a traceless coefficient vector `δ` sorted in
/// decreasing order.
///
/// Coefficients within [`zero_tolerance`] of zero are treated as zero and
/// get the unit vector `e_i`. The remaining ones are handled by sign
/// pattern:
///
/// * one positive, one negative: `(e_p ± e_q)/√2`;
/// * three nonzero: the three-element construction with `K = √2`;
/// * two positive, two negative: `t₁` pairs the largest positive with the
///   larger negative, `t₂` the other two, and `t₃, t₄` are the equal-weight
///   combinations of the complementary vectors.
///
/// In the generic case this yields `[t₁, t₂, t₃, t₄, e₃, …, e_{N-2}]`.
pub fn isotropic_basis(delta: &RVector) -> Result<RMatrix> {
    let n = delta.len();
    if !delta.iter().all(|d| d.is_finite()) {
        return Err(Error::InvalidInput("non-finite eigenvalues".into()));
    }
    if n == 0 || delta.amax() <= zero_tolerance(delta) {
        return Ok(RMatrix::identity(n, n));
    }
    let tol = zero_tolerance(delta);
    let pos: Vec<usize> = (0..n).filter(|&i| delta[i] > tol).collect();
    let neg: Vec<usize> = (0..n).filter(|&i| delta[i] < -tol).collect();

    let mut basis = Basis::new(n);
    let used: Vec<usize> = match (pos.len(), neg.len()) {
        (0, 0) => Vec::new(),
        (1, 1) => {
            let (p, q) = (pos[0], neg[0]);
            basis.push(&[(p, FRAC_1_SQRT_2), (q, FRAC_1_SQRT_2)]);
            basis.push(&[(p, FRAC_1_SQRT_2), (q, -FRAC_1_SQRT_2)]);
            vec![p, q]
        }
        (2, 1) | (1, 2) => {
            let idx: Vec<usize> = pos.iter().chain(neg.iter()).copied().collect();
            let (a, b, c) = (idx[0], idx[1], idx[2]);
            let (d_a, d_c) = (delta[a], delta[c]);
            let span = d_a - d_c;
            let w_a = (-d_c / span).sqrt();
            let w_c = (d_a / span).sqrt();
            let h_a = (d_a / (2.0 * span)).sqrt();
            let h_c = (-d_c / (2.0 * span)).sqrt();
            basis.push(&[(a, w_a), (c, w_c)]);
            basis.push(&[(a, h_a), (b, FRAC_1_SQRT_2), (c, -h_c)]);
            basis.push(&[(a, -h_a), (b, FRAC_1_SQRT_2), (c, h_c)]);
            vec![a, b, c]
        }
        (2, 2) => {
            let (p1, p2, q1, q2) = (pos[0], pos[1], neg[0], neg[1]);
            let s1 = delta[p1] - delta[q1];
            let s2 = delta[p2] - delta[q2];
            // t₁ on (p1, q1), t₂ on (p2, q2).
            let t1_p = (-delta[q1] / s1).sqrt();
            let t1_q = (delta[p1] / s1).sqrt();
            let t2_p = (-delta[q2] / s2).sqrt();
            let t2_q = (delta[p2] / s2).sqrt();
            let r = FRAC_1_SQRT_2;
            basis.push(&[(p1, t1_p), (q1, t1_q)]);
            basis.push(&[(p2, t2_p), (q2, t2_q)]);
            basis.push(&[(p1, r * t1_q), (p2, r * t2_q), (q1, -r * t1_p), (q2, -r * t2_p)]);
            basis.push(&[(p1, r * t1_q), (p2, -r * t2_q), (q1, -r * t1_p), (q2, r * t2_p)]);
            vec![p1, p2, q1, q2]
        }
        (p, q) => {
            return Err(Error::InternalConsistency(format!(
                "coefficient sign pattern ({p} positive, {q} negative) has no traceless pairing"
            )));
        }
    };

    for i in (0..n).filter(|i| !used.contains(i)) {
        basis.push(&[(i, 1.0)]);
    }
    Ok(basis.m)
}

/// Columns filled in order into a preallocated square matrix.
struct Basis {
    m: RMatrix,
    next: usize,
}

impl Basis {
    fn new(n: usize) -> Self {
        Self {
            m: RMatrix::zeros(n, n),
            next: 0,
        }
    }

    fn push(&mut self, entries: &[(usize, f64)]) {
        for &(i, w) in entries {
            self.m[(i, self.next)] = w;
        }
        self.next += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn check_basis(delta: &RVector, t: &RMatrix) {
        let n = delta.len();
        let gram = t.transpose() * t;
        assert!((gram - RMatrix::identity(n, n)).amax() < 1e-10);
        let scale = delta.amax().max(1.0);
        for col in t.column_iter() {
            let form: f64 = col.iter().zip(delta.iter()).map(|(x, d)| d * x * x).sum();
            assert!(form.abs() < 1e-9 * scale, "form {form}");
        }
    }

    #[test]
    fn two_elements() {
        let delta = RVector::from_vec(vec![1.0, -1.0]);
        let t = isotropic_basis(&delta).unwrap();
        let h = FRAC_1_SQRT_2;
        let expected = RMatrix::from_row_slice(2, 2, &[h, h, h, -h]);
        assert!((&t - expected).amax() < 1e-15);
        check_basis(&delta, &t);
    }

    #[test]
    fn three_elements() {
        let delta = RVector::from_vec(vec![2.0, -0.5, -1.5]);
        let t = isotropic_basis(&delta).unwrap();
        assert!((t[(0, 0)] - (1.5f64 / 3.5).sqrt()).abs() < 1e-15);
        assert_eq!(t[(1, 0)], 0.0);
        assert!((t[(2, 0)] - (2.0f64 / 3.5).sqrt()).abs() < 1e-15);
        check_basis(&delta, &t);
    }

    #[test]
    fn generic_six() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            // δ = (a, b, 0, 0, -c, -d) with a + b = c + d.
            let mut p = [rng.random::<f64>() + 0.01, rng.random::<f64>() + 0.01];
            p.sort_by(|x, y| y.total_cmp(x));
            let total = p[0] + p[1];
            let split = rng.random::<f64>() * 0.98 + 0.01;
            let mut q = [total * split, total * (1.0 - split)];
            q.sort_by(|x, y| x.total_cmp(y));
            let delta = RVector::from_vec(vec![p[0], p[1], 0.0, 0.0, -q[0], -q[1]]);
            let t = isotropic_basis(&delta).unwrap();
            // Kernel columns come last, in index order.
            assert_eq!(t[(2, 4)], 1.0);
            assert_eq!(t[(3, 5)], 1.0);
            check_basis(&delta, &t);
        }
    }

    #[test]
    fn degenerate_patterns() {
        let cases = [
            vec![0.7, 0.0, 0.0, -0.7],
            vec![0.9, 0.2, 0.0, 0.0, -1.1],
            vec![1.1, 0.0, -0.3, -0.8],
            vec![0.0, 0.0, 0.0],
            vec![0.4, 0.0, -0.4],
        ];
        for c in cases {
            let delta = RVector::from_vec(c);
            let t = isotropic_basis(&delta).unwrap();
            check_basis(&delta, &t);
        }
    }

    #[test]
    fn one_sided_pattern_is_rejected() {
        let delta = RVector::from_vec(vec![1.0, 0.5, 0.0]);
        assert!(matches!(
            isotropic_basis(&delta),
            Err(Error::InternalConsistency(_))
        ));
    }
}
