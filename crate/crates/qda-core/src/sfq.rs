//! Pencils in Q-standard form and the residuals of their eigen-equations.
//!
//! An SFQ pencil is
//!
//! ```text
//! A = [[E, 0], [-X, I]]·Q₁,   B = [[I, -Y], [0, F]]·Q₂
//! ```
//!
//! with E (m×m), F (n×n), X (n×m), Y (m×n) and Q₁, Q₂ permutations of order m+n.

use crate::densela::{lu_solve, ComplexMatrix, LuFactor, Permutation, C64};
use crate::error::{Error, Result};

/// A regular pencil A − λB with a declared split: m eigenvalues inside, n outside.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralPencil {
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
    pub m: usize,
    pub n: usize,
}

impl GeneralPencil {
    pub fn new(a: ComplexMatrix, b: ComplexMatrix, m: usize, n: usize) -> Result<Self> {
        let big = m + n;
        for (mat, op) in [(&a, "GeneralPencil A"), (&b, "GeneralPencil B")] {
            if mat.rows() != big {
                return Err(Error::DimensionMismatch { op, expected: big, found: mat.rows() });
            }
            if mat.cols() != big {
                return Err(Error::DimensionMismatch { op, expected: big, found: mat.cols() });
            }
        }
        if m == 0 || n == 0 {
            return Err(Error::InvalidArgument("m and n must be positive"));
        }
        Ok(Self { a, b, m, n })
    }

    pub fn dim(&self) -> usize {
        self.m + self.n
    }
}

/// Dense blocks of Q₁Q₂ᵀ = [[Q11, Q12], [Q21, Q22]].
#[derive(Clone, Debug, PartialEq)]
pub struct QBlocks {
    pub q11: ComplexMatrix,
    pub q12: ComplexMatrix,
    pub q21: ComplexMatrix,
    pub q22: ComplexMatrix,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SfqPencil {
    pub m: usize,
    pub n: usize,
    pub e: ComplexMatrix,
    pub f: ComplexMatrix,
    pub x: ComplexMatrix,
    pub y: ComplexMatrix,
    pub q1: Permutation,
    pub q2: Permutation,
}

fn expect_shape(mat: &ComplexMatrix, rows: usize, cols: usize, op: &'static str) -> Result<()> {
    if mat.rows() != rows {
        return Err(Error::DimensionMismatch { op, expected: rows, found: mat.rows() });
    }
    if mat.cols() != cols {
        return Err(Error::DimensionMismatch { op, expected: cols, found: mat.cols() });
    }
    Ok(())
}

impl SfqPencil {
    pub fn new(
        e: ComplexMatrix,
        f: ComplexMatrix,
        x: ComplexMatrix,
        y: ComplexMatrix,
        q1: Permutation,
        q2: Permutation,
    ) -> Result<Self> {
        let m = e.rows();
        let n = f.rows();
        expect_shape(&e, m, m, "SfqPencil E")?;
        expect_shape(&f, n, n, "SfqPencil F")?;
        expect_shape(&x, n, m, "SfqPencil X")?;
        expect_shape(&y, m, n, "SfqPencil Y")?;
        for (q, op) in [(&q1, "SfqPencil Q1"), (&q2, "SfqPencil Q2")] {
            if q.len() != m + n {
                return Err(Error::DimensionMismatch { op, expected: m + n, found: q.len() });
            }
        }
        Ok(Self { m, n, e, f, x, y, q1, q2 })
    }

    /// SF1 pencil (Q₁ = Q₂ = I).
    pub fn sf1(e: ComplexMatrix, f: ComplexMatrix, x: ComplexMatrix, y: ComplexMatrix) -> Result<Self> {
        let big = e.rows() + f.rows();
        Self::new(e, f, x, y, Permutation::identity(big), Permutation::identity(big))
    }

    /// SF2 pencil (Q₁ = Π, Q₂ = I, so Q₁Q₂ᵀ is the block swap). Requires m = n.
    pub fn sf2(e: ComplexMatrix, f: ComplexMatrix, x: ComplexMatrix, y: ComplexMatrix) -> Result<Self> {
        let (m, n) = (e.rows(), f.rows());
        if m != n {
            return Err(Error::DimensionMismatch { op: "sf2", expected: m, found: n });
        }
        Self::new(e, f, x, y, Permutation::block_swap(m, n), Permutation::identity(m + n))
    }

    pub fn dim(&self) -> usize {
        self.m + self.n
    }

    /// [[E, 0], [-X, I]], i.e. A·Q₁ᵀ.
    pub fn structured_a(&self) -> ComplexMatrix {
        let mut a = ComplexMatrix::zeros(self.dim(), self.dim());
        a.set_block(0, 0, &self.e);
        a.set_block(self.m, 0, &-&self.x);
        for k in 0..self.n {
            a[(self.m + k, self.m + k)] = C64::new(1.0, 0.0);
        }
        a
    }

    /// [[I, -Y], [0, F]], i.e. B·Q₂ᵀ.
    pub fn structured_b(&self) -> ComplexMatrix {
        let mut b = ComplexMatrix::zeros(self.dim(), self.dim());
        for k in 0..self.m {
            b[(k, k)] = C64::new(1.0, 0.0);
        }
        b.set_block(0, self.m, &-&self.y);
        b.set_block(self.m, self.m, &self.f);
        b
    }

    pub fn assemble(&self) -> GeneralPencil {
        let a = self.q1.apply_cols(&self.structured_a(), false).expect("Q1 order");
        let b = self.q2.apply_cols(&self.structured_b(), false).expect("Q2 order");
        GeneralPencil { a, b, m: self.m, n: self.n }
    }

    /// R = Q₁Q₂ᵀ as a permutation.
    pub fn q_product(&self) -> Permutation {
        self.q1.compose(&self.q2.inverse())
    }

    pub fn q_blocks(&self) -> QBlocks {
        let r = self.q_product().to_matrix();
        let (m, n) = (self.m, self.n);
        QBlocks {
            q11: r.block(0, 0, m, m),
            q12: r.block(0, m, m, n),
            q21: r.block(m, 0, n, m),
            q22: r.block(m, m, n, n),
        }
    }

    /// Q₁Q₂ᵀ = I.
    pub fn is_sf1(&self) -> bool {
        self.q_product().is_identity()
    }

    /// Q₁Q₂ᵀ = Π_{m,m}.
    pub fn is_sf2(&self) -> bool {
        self.m == self.n && self.q_product() == Permutation::block_swap(self.m, self.n)
    }

    /// The pencil ΠᵀBΠ − λΠᵀAΠ; its blocks are (F, E, Y, X).
    pub fn dual(&self) -> SfqPencil {
        let pi = Permutation::block_swap(self.m, self.n);
        let pit = pi.inverse();
        SfqPencil {
            m: self.n,
            n: self.m,
            e: self.f.clone(),
            f: self.e.clone(),
            x: self.y.clone(),
            y: self.x.clone(),
            q1: pit.compose(&self.q2).compose(&pi),
            q2: pit.compose(&self.q1).compose(&pi),
        }
    }

    pub fn max_abs_xy(&self) -> f64 {
        self.x.max_abs().max(self.y.max_abs())
    }

    pub fn is_finite(&self) -> bool {
        self.e.is_finite() && self.f.is_finite() && self.x.is_finite() && self.y.is_finite()
    }

    /// Q₁ᵀ[I; X]: basis for the stable eigenspace carried by this pencil's X.
    pub fn stable_basis(&self) -> ComplexMatrix {
        basis_from_x(&self.q1, &self.x)
    }

    /// Q₂ᵀ[Y; I]: basis for the anti-stable eigenspace carried by Y.
    pub fn anti_stable_basis(&self) -> ComplexMatrix {
        basis_from_y(&self.q2, &self.y)
    }
}

/// Q₁ᵀ[I; X].
pub fn basis_from_x(q1: &Permutation, x: &ComplexMatrix) -> ComplexMatrix {
    let z = ComplexMatrix::identity(x.cols()).vstack(x).expect("X has m columns");
    q1.apply_rows(&z, true).expect("Q1 order")
}

/// Q₂ᵀ[Y; I].
pub fn basis_from_y(q2: &Permutation, y: &ComplexMatrix) -> ComplexMatrix {
    let z = y.vstack(&ComplexMatrix::identity(y.cols())).expect("Y has n columns");
    q2.apply_rows(&z, true).expect("Q2 order")
}

/// X such that Q₁ᵀ[I; X] spans the same space as `z` (N×m), i.e. X = Z₂Z₁⁻¹ with
/// [Z₁; Z₂] = Q₁Z.
pub fn x_from_basis(q1: &Permutation, z: &ComplexMatrix, m: usize) -> Result<ComplexMatrix> {
    let qz = q1.apply_rows(z, false)?;
    let z1 = qz.block(0, 0, m, z.cols());
    let z2 = qz.block(m, 0, qz.rows() - m, z.cols());
    LuFactor::new(&z1)?.solve_right(&z2)
}

// Products with R = Q₁Q₂ᵀ used by the kernels. All are pure entry moves.

/// R·[Y; I] (N×n). Top block Q11·Y + Q12, bottom Q21·Y + Q22.
pub(crate) fn r_yi(r: &Permutation, y: &ComplexMatrix) -> ComplexMatrix {
    let g = y.vstack(&ComplexMatrix::identity(y.cols())).expect("shape");
    r.apply_rows(&g, false).expect("shape")
}

/// [-X, I]·R (n×N). Left block Q21 − X·Q11, right Q22 − X·Q12.
pub(crate) fn mxi_r(r: &Permutation, x: &ComplexMatrix) -> ComplexMatrix {
    let k = (-x).hstack(&ComplexMatrix::identity(x.rows())).expect("shape");
    r.apply_cols(&k, false).expect("shape")
}

/// Rᵀ·[I; X] (N×m). Top block Q11ᵀ + Q21ᵀ·X, bottom Q12ᵀ + Q22ᵀ·X.
pub(crate) fn rt_ix(r: &Permutation, x: &ComplexMatrix) -> ComplexMatrix {
    let g = ComplexMatrix::identity(x.cols()).vstack(x).expect("shape");
    r.apply_rows(&g, true).expect("shape")
}

/// [I, -Y]·Rᵀ (m×N). Left block Q11ᵀ − Y·Q12ᵀ, right Q21ᵀ − Y·Q22ᵀ.
pub(crate) fn imy_rt(r: &Permutation, y: &ComplexMatrix) -> ComplexMatrix {
    let k = ComplexMatrix::identity(y.rows()).hstack(&-y).expect("shape");
    r.apply_cols(&k, true).expect("shape")
}

/// ‖A·Q₁ᵀZ − B·Q₁ᵀZ·M‖_F / max(1, ‖Z‖_F) with Z = [I; X].
///
/// Vanishes when X solves the primal equation and M is the matching
/// (powered) restriction.
pub fn primal_eig_residual(p: &SfqPencil, x: &ComplexMatrix, mm: &ComplexMatrix) -> Result<f64> {
    expect_shape(x, p.n, p.m, "primal_eig_residual X")?;
    expect_shape(mm, p.m, p.m, "primal_eig_residual M")?;
    let g = p.assemble();
    let z = basis_from_x(&p.q1, x);
    let lhs = &g.a * &z;
    let rhs = &(&g.b * &z) * mm;
    Ok((&lhs - &rhs).norm_fro() / z.norm_fro().max(1.0))
}

/// ‖A·Q₂ᵀZ·N − B·Q₂ᵀZ‖_F / max(1, ‖Z‖_F) with Z = [Y; I].
pub fn dual_eig_residual(p: &SfqPencil, y: &ComplexMatrix, nn: &ComplexMatrix) -> Result<f64> {
    expect_shape(y, p.m, p.n, "dual_eig_residual Y")?;
    expect_shape(nn, p.n, p.n, "dual_eig_residual N")?;
    let g = p.assemble();
    let z = basis_from_y(&p.q2, y);
    let lhs = &(&g.a * &z) * nn;
    let rhs = &g.b * &z;
    Ok((&lhs - &rhs).norm_fro() / z.norm_fro().max(1.0))
}

/// Residual of the primal equation
/// X = X₀ + F₀(Q12ᵀ + Q22ᵀX)[Q11ᵀ − Y₀Q12ᵀ + (Q21ᵀ − Y₀Q22ᵀ)X]⁻¹E₀,
/// normalized by max(1, ‖X‖_F).
pub fn primal_nme_residual(p0: &SfqPencil, x: &ComplexMatrix) -> Result<f64> {
    expect_shape(x, p0.n, p0.m, "primal_nme_residual X")?;
    let m = p0.m;
    let r = p0.q_product();
    let k = rt_ix(&r, x);
    let top = k.block(0, 0, m, m);
    let bottom = k.block(m, 0, p0.n, m);
    let bracket = &top - &(&p0.y * &bottom);
    let t = lu_solve(&bracket, &p0.e)?;
    let rhs = &p0.x + &(&(&p0.f * &bottom) * &t);
    Ok((x - &rhs).norm_fro() / x.norm_fro().max(1.0))
}

/// Residual of the dual equation
/// Y = Y₀ + E₀(Q12 + Q11Y)[Q22 − X₀Q12 + (Q21 − X₀Q11)Y]⁻¹F₀,
/// normalized by max(1, ‖Y‖_F).
pub fn dual_nme_residual(p0: &SfqPencil, y: &ComplexMatrix) -> Result<f64> {
    expect_shape(y, p0.m, p0.n, "dual_nme_residual Y")?;
    let m = p0.m;
    let r = p0.q_product();
    let k = r_yi(&r, y);
    let top = k.block(0, 0, m, p0.n);
    let bottom = k.block(m, 0, p0.n, p0.n);
    let bracket = &bottom - &(&p0.x * &top);
    let t = lu_solve(&bracket, &p0.f)?;
    let rhs = &p0.y + &(&(&p0.e * &top) * &t);
    Ok((y - &rhs).norm_fro() / y.norm_fro().max(1.0))
}
