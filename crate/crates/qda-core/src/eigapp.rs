//! Half-plane splitting through the Cayley transform, and basis residuals.

use crate::densela::{lu_solve, thin_qr, ComplexMatrix, C64};
use crate::driver::{run_qda, QdaConfig, QdaResult};
use crate::error::{Error, Result};
use crate::sfq::GeneralPencil;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CayleyParams {
    /// Negative shift.
    pub gamma: f64,
    /// Treat the input as already split by the unit circle.
    pub bypass: bool,
}

impl Default for CayleyParams {
    fn default() -> Self {
        Self { gamma: -1.0, bypass: false }
    }
}

/// (A − γB, A + γB). Eigenvalues move by λ ↦ (λ − γ)/(λ + γ); eigenvectors stay.
pub fn cayley(g: &GeneralPencil, gamma: f64) -> Result<GeneralPencil> {
    if !(gamma < 0.0) {
        return Err(Error::InvalidArgument("Cayley shift must be negative"));
    }
    let gb = g.b.scale_real(gamma);
    Ok(GeneralPencil {
        a: &g.a - &gb,
        b: &g.a + &gb,
        m: g.m,
        n: g.n,
    })
}

pub fn cayley_map(lambda: C64, gamma: f64) -> C64 {
    (lambda - gamma) / (lambda + gamma)
}

/// max over stable λ of |γ − λ|/|γ + λ| and over anti-stable λ of |γ + λ|/|γ − λ|.
pub fn rho_gamma(gamma: f64, stable: &[C64], anti_stable: &[C64]) -> f64 {
    let g = C64::new(gamma, 0.0);
    let s = stable.iter().map(|&l| (g - l).norm() / (g + l).norm());
    let a = anti_stable.iter().map(|&l| (g + l).norm() / (g - l).norm());
    s.chain(a).fold(0.0, f64::max)
}

/// ‖HZ − ZM‖_F / (max(1, ‖X‖_F)·(‖H‖₂ + ‖M‖₂)) with M = (ZᴴZ)⁻¹ZᴴHZ and
/// 2-norms estimated as √(‖·‖₁‖·‖∞). `x_norm` defaults to ‖Z‖_F.
pub fn nres1(h: &ComplexMatrix, z: &ComplexMatrix, x_norm: Option<f64>) -> Result<f64> {
    if h.rows() != z.rows() || !h.is_square() {
        return Err(Error::DimensionMismatch { op: "nres1", expected: h.rows(), found: z.rows() });
    }
    let zh = z.adjoint();
    let hz = h * z;
    let mm = lu_solve(&(&zh * z), &(&zh * &hz))?;
    let num = (&hz - &(z * &mm)).norm_fro();
    let xn = x_norm.unwrap_or_else(|| z.norm_fro()).max(1.0);
    Ok(num / (xn * (h.two_est() + mm.two_est())))
}

/// ‖HU − U(UᴴHU)‖_F / (√k·(‖H‖₂ + ‖UᴴHU‖₂)) with U an orthonormal basis of
/// span(Z) and k its dimension.
pub fn nres2(h: &ComplexMatrix, z: &ComplexMatrix) -> Result<f64> {
    if h.rows() != z.rows() || !h.is_square() {
        return Err(Error::DimensionMismatch { op: "nres2", expected: h.rows(), found: z.rows() });
    }
    let (u, _) = thin_qr(z)?;
    let hu = h * &u;
    let k = &u.adjoint() * &hu;
    let num = (&hu - &(&u * &k)).norm_fro();
    let dim = libm::sqrt(z.cols() as f64);
    Ok(num / (dim * (h.two_est() + k.two_est())))
}

/// Pencil analogue of NRes₂: distance of A·span(Z) from B·span(Z),
/// ‖AU − VVᴴAU‖_F / (√k·(‖A‖₂ + ‖B‖₂)) with U, V orthonormal bases of span(Z), span(BZ).
pub fn deflating_residual(a: &ComplexMatrix, b: &ComplexMatrix, z: &ComplexMatrix) -> Result<f64> {
    if a.rows() != z.rows() || b.rows() != z.rows() {
        return Err(Error::DimensionMismatch { op: "deflating_residual", expected: a.rows(), found: z.rows() });
    }
    let (u, _) = thin_qr(z)?;
    let (v, _) = thin_qr(&(b * &u))?;
    let au = a * &u;
    let num = (&au - &(&v * &(&v.adjoint() * &au))).norm_fro();
    let dim = libm::sqrt(z.cols() as f64);
    Ok(num / (dim * (a.two_est() + b.two_est())))
}

#[derive(Clone, Debug)]
pub struct EigenspaceBases {
    /// Q₁ᵀ[I; Φ], spanning the left-half-plane eigenspace.
    pub stable_basis: ComplexMatrix,
    /// Q₂ᵀ[Ψ; I], spanning the right-half-plane eigenspace.
    pub anti_stable_basis: ComplexMatrix,
    /// The disk-split pencil handed to the doubling loop.
    pub transformed: GeneralPencil,
    pub result: QdaResult,
}

/// Cayley-transform `g` (unless bypassed) and run the guarded doubling loop.
pub fn solve_halfplane(g: &GeneralPencil, c: CayleyParams, cfg: &QdaConfig) -> Result<EigenspaceBases> {
    let transformed = if c.bypass { g.clone() } else { cayley(g, c.gamma)? };
    let result = run_qda(&transformed, cfg)?;
    Ok(EigenspaceBases {
        stable_basis: result.stable_basis(),
        anti_stable_basis: result.anti_stable_basis(),
        transformed,
        result,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(v: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_diag(&v.iter().map(|&x| C64::new(x, 0.0)).collect::<alloc::vec::Vec<_>>())
    }

    #[test]
    fn cayley_scalar() {
        let g = GeneralPencil::new(diag(&[-1.0, 2.0]), ComplexMatrix::identity(2), 1, 1).unwrap();
        let c = cayley(&g, -1.0).unwrap();
        assert_eq!(c.a, diag(&[0.0, 3.0]));
        assert_eq!(c.b, diag(&[-2.0, 1.0]));
        assert!((cayley_map(C64::new(-3.0, 0.0), -1.0) - C64::new(0.5, 0.0)).norm() < 1e-15);
        assert!(cayley(&g, 1.0).is_err());
    }

    #[test]
    fn rho_examples() {
        let r = rho_gamma(-1.0, &[C64::new(-3.0, 0.0)], &[C64::new(2.0, 0.0)]);
        assert!((r - 0.5).abs() < 1e-15);
    }

    #[test]
    fn exact_bases_have_zero_residual() {
        let h = diag(&[-1.0, 2.0, -3.0]);
        let z = ComplexMatrix::from_real(3, 2, &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(nres2(&h, &z).unwrap() <= 1e-14);
        assert!(nres1(&h, &z, None).unwrap() <= 1e-13);
        let b = ComplexMatrix::identity(3);
        assert!(deflating_residual(&h, &b, &z).unwrap() <= 1e-14);
    }

    #[test]
    fn halfplane_diagonal() {
        let g = GeneralPencil::new(diag(&[-1.0, 2.0]), ComplexMatrix::identity(2), 1, 1).unwrap();
        let s = solve_halfplane(&g, CayleyParams::default(), &QdaConfig::default()).unwrap();
        assert_eq!(s.stable_basis, ComplexMatrix::from_real(2, 1, &[1.0, 0.0]).unwrap());
        assert_eq!(s.anti_stable_basis, ComplexMatrix::from_real(2, 1, &[0.0, 1.0]).unwrap());
    }

    #[test]
    fn bypass_passes_through() {
        let g = GeneralPencil::new(diag(&[0.5, 2.0]), ComplexMatrix::identity(2), 1, 1).unwrap();
        let s = solve_halfplane(&g, CayleyParams { gamma: -1.0, bypass: true }, &QdaConfig::default()).unwrap();
        assert_eq!(s.transformed, g);
    }
}
