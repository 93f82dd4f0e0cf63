use alloc::vec::Vec;

use num_complex::Complex64 as C64;

use super::{ComplexMatrix, Permutation};
use crate::error::{Error, Result};

/// Relative pivot threshold: a pivot below `SINGULARITY_TOL · ‖A‖∞` is treated as zero.
pub const SINGULARITY_TOL: f64 = 1e-13;

/// PA = LU with partial (row) pivoting. L is unit lower triangular.
#[derive(Clone, Debug)]
pub struct LuFactor {
    lu: ComplexMatrix,
    perm: Permutation,
    min_pivot: f64,
    max_pivot: f64,
    a_norm_one: f64,
}

impl LuFactor {
    pub fn new(a: &ComplexMatrix) -> Result<Self> {
        Self::with_tol(a, SINGULARITY_TOL)
    }

    pub fn with_tol(a: &ComplexMatrix, tol: f64) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch {
                op: "lu_factor",
                expected: a.rows(),
                found: a.cols(),
            });
        }
        let n = a.rows();
        let thresh = tol * a.norm_inf();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut min_pivot = f64::INFINITY;
        let mut max_pivot = 0.0f64;
        for k in 0..n {
            let mut p = k;
            let mut best = lu[(k, k)].norm();
            for i in k + 1..n {
                let v = lu[(i, k)].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if !(best > thresh) || best == 0.0 {
                return Err(Error::SingularMatrix { pivot: k });
            }
            min_pivot = min_pivot.min(best);
            max_pivot = max_pivot.max(best);
            lu.swap_rows(k, p);
            perm.swap(k, p);
            let piv = lu[(k, k)];
            let (top, bottom) = lu.data_mut().split_at_mut((k + 1) * n);
            let prow = &top[k * n..(k + 1) * n];
            for row in bottom.chunks_mut(n) {
                let l = row[k] / piv;
                row[k] = l;
                if l.re == 0.0 && l.im == 0.0 {
                    continue;
                }
                for j in k + 1..n {
                    row[j] -= l * prow[j];
                }
            }
        }
        if n == 0 {
            min_pivot = 0.0;
        }
        Ok(Self {
            lu,
            perm: Permutation::new(perm).expect("pivot order is a permutation"),
            min_pivot,
            max_pivot,
            a_norm_one: a.norm_one(),
        })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    pub fn min_pivot(&self) -> f64 {
        self.min_pivot
    }

    pub fn max_pivot(&self) -> f64 {
        self.max_pivot
    }

    /// Cheap condition indicator: max |pivot| / min |pivot|.
    pub fn condition_estimate(&self) -> f64 {
        self.max_pivot / self.min_pivot
    }

    /// Row permutation P of PA = LU.
    pub fn row_perm(&self) -> &Permutation {
        &self.perm
    }

    /// Packed factors: strictly-lower part is L, upper part is U.
    pub fn packed(&self) -> &ComplexMatrix {
        &self.lu
    }

    /// A⁻¹·B.
    pub fn solve(&self, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        let n = self.dim();
        if b.rows() != n {
            return Err(Error::DimensionMismatch {
                op: "lu_solve",
                expected: n,
                found: b.rows(),
            });
        }
        let mut x = self.perm.apply_rows(b, false)?;
        let nr = b.cols();
        for i in 0..n {
            for k in 0..i {
                let l = self.lu[(i, k)];
                if l.re == 0.0 && l.im == 0.0 {
                    continue;
                }
                for j in 0..nr {
                    let v = x[(k, j)];
                    x[(i, j)] -= l * v;
                }
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let u = self.lu[(i, k)];
                if u.re == 0.0 && u.im == 0.0 {
                    continue;
                }
                for j in 0..nr {
                    let v = x[(k, j)];
                    x[(i, j)] -= u * v;
                }
            }
            let d = C64::new(1.0, 0.0) / self.lu[(i, i)];
            for v in x.row_mut(i) {
                *v *= d;
            }
        }
        Ok(x)
    }

    /// B·A⁻¹.
    pub fn solve_right(&self, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        let n = self.dim();
        if b.cols() != n {
            return Err(Error::DimensionMismatch {
                op: "lu_solve_right",
                expected: n,
                found: b.cols(),
            });
        }
        // X A = B  ⇔  (X Pᵀ) L U = B: solve against U, then L, then undo P.
        let mut y = b.clone();
        let nr = b.rows();
        for j in 0..n {
            for k in 0..j {
                let u = self.lu[(k, j)];
                if u.re == 0.0 && u.im == 0.0 {
                    continue;
                }
                for r in 0..nr {
                    let v = y[(r, k)];
                    y[(r, j)] -= v * u;
                }
            }
            let d = C64::new(1.0, 0.0) / self.lu[(j, j)];
            for r in 0..nr {
                y[(r, j)] *= d;
            }
        }
        for j in (0..n).rev() {
            for k in j + 1..n {
                let l = self.lu[(k, j)];
                if l.re == 0.0 && l.im == 0.0 {
                    continue;
                }
                for r in 0..nr {
                    let v = y[(r, k)];
                    y[(r, j)] -= v * l;
                }
            }
        }
        self.perm.apply_cols(&y, false)
    }

    /// κ₁(A) = ‖A‖₁‖A⁻¹‖₁, forming the inverse (O(n³)).
    pub fn cond_one(&self) -> f64 {
        self.a_norm_one * self.inverse().norm_one()
    }

    pub fn inverse(&self) -> ComplexMatrix {
        self.solve(&ComplexMatrix::identity(self.dim())).expect("square identity")
    }

    pub fn determinant(&self) -> C64 {
        let mut d = C64::new(1.0, 0.0);
        for i in 0..self.dim() {
            d *= self.lu[(i, i)];
        }
        // sign of the permutation
        let mut seen = alloc::vec![false; self.dim()];
        let p = self.perm.as_slice();
        for s in 0..p.len() {
            if seen[s] {
                continue;
            }
            let mut len = 0;
            let mut k = s;
            while !seen[k] {
                seen[k] = true;
                k = p[k];
                len += 1;
            }
            if len % 2 == 0 {
                d = -d;
            }
        }
        d
    }
}

pub fn lu_factor(a: &ComplexMatrix) -> Result<LuFactor> {
    LuFactor::new(a)
}

/// A⁻¹·B without forming the inverse.
pub fn lu_solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    LuFactor::new(a)?.solve(b)
}

/// Solve with a triangular matrix. `lower` selects forward substitution.
pub fn tri_solve(t: &ComplexMatrix, b: &ComplexMatrix, lower: bool) -> Result<ComplexMatrix> {
    let n = t.rows();
    if !t.is_square() || b.rows() != n {
        return Err(Error::DimensionMismatch {
            op: "tri_solve",
            expected: n,
            found: b.rows(),
        });
    }
    let mut x = b.clone();
    let order: Vec<usize> = if lower { (0..n).collect() } else { (0..n).rev().collect() };
    for &i in &order {
        let d = t[(i, i)];
        if d.norm() == 0.0 {
            return Err(Error::SingularMatrix { pivot: i });
        }
        let range: Vec<usize> = if lower { (0..i).collect() } else { (i + 1..n).collect() };
        for k in range {
            let c = t[(i, k)];
            if c.re == 0.0 && c.im == 0.0 {
                continue;
            }
            for j in 0..b.cols() {
                let v = x[(k, j)];
                x[(i, j)] -= c * v;
            }
        }
        for v in x.row_mut(i) {
            *v /= d;
        }
    }
    Ok(x)
}
