use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;

use super::ComplexMatrix;
use crate::error::{Error, Result};

/// Permutation matrix P with P[i, p[i]] = 1.
///
/// Row application: (P·A)[i, :] = A[p[i], :].
/// Column application: (A·Pᵀ)[:, j] = A[:, p[j]].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    p: Vec<usize>,
}

impl Permutation {
    pub fn new(p: Vec<usize>) -> Result<Self> {
        let n = p.len();
        let mut seen = vec![false; n];
        for &k in &p {
            if k >= n || seen[k] {
                return Err(Error::InvalidArgument("not a permutation of 0..n"));
            }
            seen[k] = true;
        }
        Ok(Self { p })
    }

    pub fn identity(n: usize) -> Self {
        Self { p: (0..n).collect() }
    }

    /// Transposition of `a` and `b`.
    pub fn swap(n: usize, a: usize, b: usize) -> Self {
        let mut s = Self::identity(n);
        s.p.swap(a, b);
        s
    }

    /// Π_{m,n} = [[0, I_m], [I_n, 0]].
    pub fn block_swap(m: usize, n: usize) -> Self {
        Self {
            p: (0..m).map(|i| n + i).chain(0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.p
    }

    pub fn is_identity(&self) -> bool {
        self.p.iter().enumerate().all(|(i, &k)| i == k)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.p.len()];
        for (i, &k) in self.p.iter().enumerate() {
            inv[k] = i;
        }
        Self { p: inv }
    }

    /// Matrix product self·other.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len(), "permutation sizes differ");
        Self {
            p: self.p.iter().map(|&k| other.p[k]).collect(),
        }
    }

    /// Exchange entries `a` and `b`; as a matrix this is S·P with S the transposition.
    pub fn swap_entries(&mut self, a: usize, b: usize) {
        self.p.swap(a, b);
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        let n = self.len();
        let mut m = ComplexMatrix::zeros(n, n);
        for (i, &k) in self.p.iter().enumerate() {
            m[(i, k)] = C64::new(1.0, 0.0);
        }
        m
    }

    fn check(&self, found: usize, op: &'static str) -> Result<()> {
        if found != self.len() {
            return Err(Error::DimensionMismatch {
                op,
                expected: self.len(),
                found,
            });
        }
        Ok(())
    }

    /// P·A, or Pᵀ·A when `transpose`.
    pub fn apply_rows(&self, a: &ComplexMatrix, transpose: bool) -> Result<ComplexMatrix> {
        self.check(a.rows(), "apply_rows")?;
        let mut out = ComplexMatrix::zeros(a.rows(), a.cols());
        for (i, &k) in self.p.iter().enumerate() {
            let (dst, src) = if transpose { (k, i) } else { (i, k) };
            out.row_mut(dst).copy_from_slice(a.row(src));
        }
        Ok(out)
    }

    /// A·P, or A·Pᵀ when `transpose`.
    pub fn apply_cols(&self, a: &ComplexMatrix, transpose: bool) -> Result<ComplexMatrix> {
        self.check(a.cols(), "apply_cols")?;
        let mut out = ComplexMatrix::zeros(a.rows(), a.cols());
        for r in 0..a.rows() {
            let src = a.row(r);
            let dst = out.row_mut(r);
            for (j, &k) in self.p.iter().enumerate() {
                if transpose {
                    dst[j] = src[k];
                } else {
                    dst[k] = src[j];
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ComplexMatrix {
        ComplexMatrix::from_fn(3, 3, |i, j| C64::new((3 * i + j) as f64, i as f64))
    }

    #[test]
    fn rejects_non_permutations() {
        assert!(Permutation::new(vec![0, 0, 1]).is_err());
        assert!(Permutation::new(vec![0, 3, 1]).is_err());
        assert!(Permutation::new(vec![2, 0, 1]).is_ok());
    }

    #[test]
    fn application_matches_dense_product() {
        let p = Permutation::new(vec![2, 0, 1]).unwrap();
        let pm = p.to_matrix();
        let a = sample();
        assert_eq!(p.apply_rows(&a, false).unwrap(), &pm * &a);
        assert_eq!(p.apply_rows(&a, true).unwrap(), &pm.transpose() * &a);
        assert_eq!(p.apply_cols(&a, false).unwrap(), &a * &pm);
        assert_eq!(p.apply_cols(&a, true).unwrap(), &a * &pm.transpose());
    }

    #[test]
    fn compose_and_inverse() {
        let p = Permutation::new(vec![2, 0, 1]).unwrap();
        let q = Permutation::new(vec![1, 0, 2]).unwrap();
        assert_eq!(p.compose(&q).to_matrix(), &p.to_matrix() * &q.to_matrix());
        assert!(p.compose(&p.inverse()).is_identity());
    }

    #[test]
    fn swap_entries_is_left_transposition() {
        let mut p = Permutation::new(vec![2, 0, 1, 3]).unwrap();
        let s = Permutation::swap(4, 1, 3);
        let want = s.compose(&p);
        p.swap_entries(1, 3);
        assert_eq!(p, want);
    }

    #[test]
    fn block_swap_moves_blocks() {
        // Πᵀ [a; b] = [b; a] for a of length m, b of length n
        let pi = Permutation::block_swap(1, 2);
        let v = ComplexMatrix::from_real(3, 1, &[1.0, 2.0, 3.0]).unwrap();
        let w = pi.apply_rows(&v, true).unwrap();
        assert_eq!(w, ComplexMatrix::from_real(3, 1, &[2.0, 3.0, 1.0]).unwrap());
        let want = ComplexMatrix::from_real(3, 3, &[0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0]).unwrap();
        assert_eq!(pi.to_matrix(), want);
    }
}
