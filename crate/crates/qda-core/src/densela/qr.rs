use alloc::vec::Vec;

use num_complex::Complex64 as C64;

use super::ComplexMatrix;
use crate::error::{Error, Result};

/// Relative tolerance on |R(k,k)| against the largest column norm.
pub const RANK_TOL: f64 = 1e-13;

/// Thin Householder QR: Z = U·R with U (N×k) orthonormal and R (k×k) upper
/// triangular with real non-negative diagonal.
pub fn thin_qr(z: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let (n, k) = (z.rows(), z.cols());
    if k > n {
        return Err(Error::RankDeficient { column: n });
    }
    let scale = (0..k)
        .map(|j| libm::sqrt(z.column(j).iter().map(|v| v.norm_sqr()).sum::<f64>()))
        .fold(0.0, f64::max);
    let mut a = z.clone();
    let mut vs: Vec<Vec<C64>> = Vec::with_capacity(k);
    for j in 0..k {
        let x: Vec<C64> = (j..n).map(|i| a[(i, j)]).collect();
        let nx = libm::sqrt(x.iter().map(|v| v.norm_sqr()).sum::<f64>());
        if !(nx > RANK_TOL * scale) {
            return Err(Error::RankDeficient { column: j });
        }
        let phase = if x[0].norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            x[0] / x[0].norm()
        };
        let alpha = -phase * nx;
        let mut v = x;
        v[0] -= alpha;
        let vn = libm::sqrt(v.iter().map(|c| c.norm_sqr()).sum::<f64>());
        for c in v.iter_mut() {
            *c /= vn;
        }
        // a[j.., j..] -= 2 v (vᴴ a)
        for c in j..k {
            let mut s = C64::new(0.0, 0.0);
            for (t, vi) in v.iter().enumerate() {
                s += vi.conj() * a[(j + t, c)];
            }
            s *= 2.0;
            for (t, vi) in v.iter().enumerate() {
                a[(j + t, c)] -= vi * s;
            }
        }
        vs.push(v);
    }
    let mut r = ComplexMatrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            r[(i, j)] = a[(i, j)];
        }
    }
    // U = H₀ H₁ … H_{k-1} [I; 0]
    let mut u = ComplexMatrix::zeros(n, k);
    for i in 0..k {
        u[(i, i)] = C64::new(1.0, 0.0);
    }
    for j in (0..k).rev() {
        let v = &vs[j];
        for c in 0..k {
            let mut s = C64::new(0.0, 0.0);
            for (t, vi) in v.iter().enumerate() {
                s += vi.conj() * u[(j + t, c)];
            }
            s *= 2.0;
            for (t, vi) in v.iter().enumerate() {
                u[(j + t, c)] -= vi * s;
            }
        }
    }
    // make diag(R) real positive
    for i in 0..k {
        let d = r[(i, i)];
        let m = d.norm();
        if m == 0.0 {
            continue;
        }
        let ph = d / m;
        for j in i..k {
            r[(i, j)] *= ph.conj();
        }
        r[(i, i)] = C64::new(m, 0.0);
        for row in 0..n {
            u[(row, i)] *= ph;
        }
    }
    Ok((u, r))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_column() {
        let z = ComplexMatrix::from_real(2, 1, &[2.0, 0.0]).unwrap();
        let (u, r) = thin_qr(&z).unwrap();
        assert!(u.rel_diff(&ComplexMatrix::from_real(2, 1, &[1.0, 0.0]).unwrap()) < 1e-15);
        assert!((r[(0, 0)].re - 2.0).abs() < 1e-15);
    }

    #[test]
    fn orthonormal_input_is_kept() {
        let z = ComplexMatrix::from_real(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]).unwrap();
        let (u, r) = thin_qr(&z).unwrap();
        assert!(u.rel_diff(&z) < 1e-15);
        assert!(r.rel_diff(&ComplexMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn rank_deficient() {
        let z = ComplexMatrix::from_real(3, 2, &[1.0, 2.0, 1.0, 2.0, 1.0, 2.0]).unwrap();
        assert_eq!(thin_qr(&z).unwrap_err(), Error::RankDeficient { column: 1 });
    }

    #[test]
    fn reconstructs_complex() {
        let z = ComplexMatrix::from_fn(5, 3, |i, j| C64::new(((i * i + 3 * j) % 7) as f64, (i as f64) - (j as f64).powi(2)));
        let (u, r) = thin_qr(&z).unwrap();
        assert!((&u * &r).rel_diff(&z) < 1e-14);
        let g = &u.adjoint() * &u;
        assert!(g.rel_diff(&ComplexMatrix::identity(3)) < 1e-14);
        for i in 0..3 {
            for j in 0..i {
                assert_eq!(r[(i, j)], C64::new(0.0, 0.0));
            }
        }
    }
}
