//! One doubling step on an SFQ pencil, and the stopping rules.
//!
//! Both general kernels compute the same next pencil; they differ in which
//! small matrix gets factored. With R = Q₁Q₂ᵀ = [[Q11, Q12], [Q21, Q22]]:
//!
//! ```text
//! W  = [-X, I]·R·[Y; I]    (n×n)
//! W̃ = [I, -Y]·Rᵀ·[I; X]   (m×m)
//! ```

use crate::densela::{ComplexMatrix, LuFactor, Permutation, C64};
use crate::error::{Error, Result, Stage};
use crate::sfq::{imy_rt, mxi_r, r_yi, rt_ix, SfqPencil};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kernel {
    W,
    WTilde,
    Sf1,
    Sf2,
}

impl Kernel {
    pub fn name(self) -> &'static str {
        match self {
            Kernel::W => "W",
            Kernel::WTilde => "Wt",
            Kernel::Sf1 => "SF1",
            Kernel::Sf2 => "SF2",
        }
    }

    /// The smaller of the two general kernels (W on ties).
    pub fn auto(m: usize, n: usize) -> Self {
        if n <= m {
            Kernel::W
        } else {
            Kernel::WTilde
        }
    }
}

#[derive(Clone, Debug)]
pub struct StepOutcome {
    pub next: SfqPencil,
    pub kernel: Kernel,
    /// Smallest pivot magnitude of the kernel factorization.
    pub min_pivot: f64,
    /// max/min pivot ratio of the kernel factorization.
    pub condition: f64,
}

fn factor(k: &ComplexMatrix) -> Result<LuFactor> {
    LuFactor::new(k).map_err(|e| match e {
        Error::SingularMatrix { .. } => Error::Breakdown(Stage::Kernel),
        other => other,
    })
}

/// Q11 (m×m) of R, densely.
fn q11_of(r: &Permutation, m: usize) -> ComplexMatrix {
    let mut q = ComplexMatrix::zeros(m, m);
    for (i, &j) in r.as_slice()[..m].iter().enumerate() {
        if j < m {
            q[(i, j)] = C64::new(1.0, 0.0);
        }
    }
    q
}

/// Q22ᵀ (n×n) of R, densely.
fn q22t_of(r: &Permutation, m: usize, n: usize) -> ComplexMatrix {
    let mut q = ComplexMatrix::zeros(n, n);
    for (i, &j) in r.as_slice()[m..].iter().enumerate() {
        if j >= m {
            q[(j - m, i)] = C64::new(1.0, 0.0);
        }
    }
    q
}

/// W = Q22 − X·Q12 + (Q21 − X·Q11)·Y.
pub fn compute_w(p: &SfqPencil) -> ComplexMatrix {
    let h = mxi_r(&p.q_product(), &p.x);
    &(&h.block(0, 0, p.n, p.m) * &p.y) + &h.block(0, p.m, p.n, p.n)
}

/// W̃ = Q11ᵀ − Y·Q12ᵀ + (Q21ᵀ − Y·Q22ᵀ)·X.
pub fn compute_wt(p: &SfqPencil) -> ComplexMatrix {
    let u = imy_rt(&p.q_product(), &p.y);
    &u.block(0, 0, p.m, p.m) + &(&u.block(0, p.m, p.m, p.n) * &p.x)
}

fn next_pencil(p: &SfqPencil, e: ComplexMatrix, f: ComplexMatrix, x: ComplexMatrix, y: ComplexMatrix) -> SfqPencil {
    SfqPencil {
        m: p.m,
        n: p.n,
        e,
        f,
        x,
        y,
        q1: p.q1.clone(),
        q2: p.q2.clone(),
    }
}

/// Doubling step through W:
///
/// ```text
/// E⁺ = E[Q11 + (Q11Y + Q12)W⁻¹(XQ11 − Q21)]E     F⁺ = FW⁻¹F
/// X⁺ = X + FW⁻¹(XQ11 − Q21)E                    Y⁺ = Y + E(Q11Y + Q12)W⁻¹F
/// ```
pub fn step_w(p: &SfqPencil) -> Result<StepOutcome> {
    let (m, n) = (p.m, p.n);
    let r = p.q_product();
    let d = r_yi(&r, &p.y).block(0, 0, m, n);
    let h = mxi_r(&r, &p.x);
    let c = -&h.block(0, 0, n, m);
    let w = &(&h.block(0, 0, n, m) * &p.y) + &h.block(0, m, n, n);
    let lu = factor(&w)?;
    let sol = lu.solve(&p.f.hstack(&c)?)?;
    let wf = sol.block(0, 0, n, n);
    let wc = sol.block(0, n, n, m);
    let inner = &q11_of(&r, m) + &(&d * &wc);
    let e = &(&p.e * &inner) * &p.e;
    let f = &p.f * &wf;
    let x = &p.x + &(&(&p.f * &wc) * &p.e);
    let y = &p.y + &(&(&p.e * &d) * &wf);
    Ok(StepOutcome {
        next: next_pencil(p, e, f, x, y),
        kernel: Kernel::W,
        min_pivot: lu.min_pivot(),
        condition: lu.condition_estimate(),
    })
}

/// Doubling step through W̃:
///
/// ```text
/// E⁺ = EW̃⁻¹E                      F⁺ = F[Q22ᵀ + (Q22ᵀX + Q12ᵀ)W̃⁻¹(YQ22ᵀ − Q21ᵀ)]F
/// X⁺ = X + F(Q22ᵀX + Q12ᵀ)W̃⁻¹E    Y⁺ = Y + EW̃⁻¹(YQ22ᵀ − Q21ᵀ)F
/// ```
pub fn step_wt(p: &SfqPencil) -> Result<StepOutcome> {
    let (m, n) = (p.m, p.n);
    let r = p.q_product();
    let k = rt_ix(&r, &p.x);
    let c = k.block(m, 0, n, m);
    let u = imy_rt(&r, &p.y);
    let d = -&u.block(0, m, m, n);
    // ([I, −Y]Rᵀ)·[I; X], grouped like W so the dual pencil's W step matches it
    let wt = &(&u.block(0, m, m, n) * &p.x) + &u.block(0, 0, m, m);
    let lu = factor(&wt)?;
    let sol = lu.solve(&p.e.hstack(&d)?)?;
    let we = sol.block(0, 0, m, m);
    let wd = sol.block(0, m, m, n);
    let inner = &q22t_of(&r, m, n) + &(&c * &wd);
    let e = &p.e * &we;
    let f = &(&p.f * &inner) * &p.f;
    let x = &p.x + &(&(&p.f * &c) * &we);
    let y = &p.y + &(&(&p.e * &wd) * &p.f);
    Ok(StepOutcome {
        next: next_pencil(p, e, f, x, y),
        kernel: Kernel::WTilde,
        min_pivot: lu.min_pivot(),
        condition: lu.condition_estimate(),
    })
}

/// SF1 step (Q₁Q₂ᵀ = I):
///
/// ```text
/// E⁺ = E(I − YX)⁻¹E       F⁺ = F(I − XY)⁻¹F
/// X⁺ = X + F(I − XY)⁻¹XE  Y⁺ = Y + EY(I − XY)⁻¹F
/// ```
pub fn step_sf1(p: &SfqPencil) -> Result<StepOutcome> {
    if !p.is_sf1() {
        return Err(Error::InvalidArgument("step_sf1 needs Q1·Q2ᵀ = I"));
    }
    let (m, n) = (p.m, p.n);
    let g = &ComplexMatrix::identity(m) - &(&p.y * &p.x);
    let h = &ComplexMatrix::identity(n) - &(&p.x * &p.y);
    let lg = factor(&g)?;
    let lh = factor(&h)?;
    let ge = lg.solve(&p.e)?;
    let sol = lh.solve(&p.f.hstack(&p.x)?)?;
    let hf = sol.block(0, 0, n, n);
    let hx = sol.block(0, n, n, m);
    let e = &p.e * &ge;
    let f = &p.f * &hf;
    let x = &p.x + &(&(&p.f * &hx) * &p.e);
    let y = &p.y + &(&(&p.e * &p.y) * &hf);
    Ok(StepOutcome {
        next: next_pencil(p, e, f, x, y),
        kernel: Kernel::Sf1,
        min_pivot: lg.min_pivot().min(lh.min_pivot()),
        condition: lg.condition_estimate().max(lh.condition_estimate()),
    })
}

/// SF2 step (m = n, Q₁Q₂ᵀ = Π):
///
/// ```text
/// E⁺ = E(X − Y)⁻¹E       F⁺ = F(Y − X)⁻¹F
/// X⁺ = X + F(X − Y)⁻¹E   Y⁺ = Y + E(Y − X)⁻¹F
/// ```
pub fn step_sf2(p: &SfqPencil) -> Result<StepOutcome> {
    if !p.is_sf2() {
        return Err(Error::InvalidArgument("step_sf2 needs m = n and Q1·Q2ᵀ = Π"));
    }
    let n = p.n;
    let lu = factor(&(&p.x - &p.y))?;
    let sol = lu.solve(&p.e.hstack(&p.f)?)?;
    let ke = sol.block(0, 0, n, n);
    let kf = sol.block(0, n, n, n);
    let e = &p.e * &ke;
    let f = -&(&p.f * &kf);
    let x = &p.x + &(&p.f * &ke);
    let y = &p.y - &(&p.e * &kf);
    Ok(StepOutcome {
        next: next_pencil(p, e, f, x, y),
        kernel: Kernel::Sf2,
        min_pivot: lu.min_pivot(),
        condition: lu.condition_estimate(),
    })
}

pub fn step(p: &SfqPencil, kernel: Kernel) -> Result<StepOutcome> {
    match kernel {
        Kernel::W => step_w(p),
        Kernel::WTilde => step_wt(p),
        Kernel::Sf1 => step_sf1(p),
        Kernel::Sf2 => step_sf2(p),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StopMode {
    /// ‖Δᵢ‖ ≤ rtol·‖Xᵢ‖.
    Plain,
    /// ‖Δᵢ‖²/(‖Δᵢ₋₁‖ − ‖Δᵢ‖) ≤ rtol·‖Xᵢ‖, falling back to Plain when the
    /// updates do not decrease.
    Kahan,
}

/// `delta` is ‖Xᵢ − Xᵢ₋₁‖_F, `prev` the previous update, `x_norm` = ‖Xᵢ‖_F.
pub fn check_stop(mode: StopMode, prev: Option<f64>, delta: f64, x_norm: f64, rtol: f64) -> bool {
    if !delta.is_finite() {
        return false;
    }
    let plain = delta <= rtol * x_norm;
    match (mode, prev) {
        (StopMode::Kahan, Some(prev)) if prev - delta > 0.0 => delta * delta / (prev - delta) <= rtol * x_norm,
        _ => plain,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: f64) -> ComplexMatrix {
        ComplexMatrix::from_real(1, 1, &[v]).unwrap()
    }

    fn close(a: &ComplexMatrix, v: f64) -> bool {
        (a[(0, 0)] - C64::new(v, 0.0)).norm() < 1e-15
    }

    #[test]
    fn sf1_scalar_example() {
        let p = SfqPencil::sf1(s(1.0), s(1.0), s(0.5), s(0.5)).unwrap();
        assert!(close(&compute_w(&p), 0.75));
        let o = step_w(&p).unwrap();
        assert!(close(&o.next.e, 4.0 / 3.0));
        assert!(close(&o.next.f, 4.0 / 3.0));
        assert!(close(&o.next.x, 0.5 + 2.0 / 3.0));
        assert!(close(&o.next.y, 0.5 + 2.0 / 3.0));
        let o1 = step_sf1(&p).unwrap();
        assert!(o1.next.x.rel_diff(&o.next.x) < 1e-15);
    }

    #[test]
    fn sf1_hand_example() {
        let p = SfqPencil::sf1(s(0.5), s(0.5), s(0.2), s(0.3)).unwrap();
        assert!(close(&compute_w(&p), 0.94));
        let o = step_w(&p).unwrap();
        assert!(close(&o.next.e, 0.25 / 0.94));
        assert!(close(&o.next.f, 0.25 / 0.94));
        assert!(close(&o.next.x, 0.2 + 0.05 / 0.94));
        assert!(close(&o.next.y, 0.3 + 0.075 / 0.94));
    }

    #[test]
    fn sf1_matrix_example() {
        let i2 = ComplexMatrix::identity(2);
        let h = i2.scale_real(0.5);
        let p = SfqPencil::sf1(i2.clone(), i2.clone(), h.clone(), h).unwrap();
        let o = step_sf1(&p).unwrap();
        assert!(o.next.e.rel_diff(&i2.scale_real(4.0 / 3.0)) < 1e-15);
        assert!(o.next.f.rel_diff(&i2.scale_real(4.0 / 3.0)) < 1e-15);
        assert!(compute_wt(&p).rel_diff(&i2.scale_real(0.75)) < 1e-15);
    }

    #[test]
    fn sf2_scalar_example() {
        let p = SfqPencil::sf2(s(1.0), s(1.0), s(2.0), s(0.0)).unwrap();
        assert!(close(&compute_wt(&p), 2.0));
        assert!(close(&compute_w(&p), -2.0));
        let o = step_wt(&p).unwrap();
        assert!(close(&o.next.e, 0.5));
        assert!(close(&o.next.f, -0.5));
        assert!(close(&o.next.x, 2.5));
        assert!(close(&o.next.y, -0.5));
        let o2 = step_sf2(&p).unwrap();
        assert!(o2.next.f.rel_diff(&o.next.f) < 1e-15);
    }

    #[test]
    fn zero_x_y_squares_e_and_f() {
        let p = SfqPencil::sf1(s(0.5), s(0.25), s(0.0), s(0.0)).unwrap();
        let o = step_w(&p).unwrap();
        assert!(close(&o.next.e, 0.25));
        assert!(close(&o.next.f, 0.0625));
        assert!(close(&o.next.x, 0.0));
    }

    #[test]
    fn singular_w_is_breakdown() {
        let p = SfqPencil::sf1(s(1.0), s(1.0), s(1.0), s(1.0)).unwrap();
        assert_eq!(step_w(&p).unwrap_err(), Error::Breakdown(Stage::Kernel));
        assert_eq!(step_wt(&p).unwrap_err(), Error::Breakdown(Stage::Kernel));
    }

    #[test]
    fn kahan_arithmetic() {
        // 1e-8 / (1e-2 − 1e-4) ≈ 1.0101e-6
        assert!(check_stop(StopMode::Kahan, Some(1e-2), 1e-4, 1.0, 1e-5));
        assert!(!check_stop(StopMode::Kahan, Some(1e-2), 1e-4, 1.0, 1e-6));
    }

    #[test]
    fn stop_rules() {
        assert!(check_stop(StopMode::Plain, None, 1e-15, 1.0, 1e-14));
        assert!(!check_stop(StopMode::Plain, None, 1e-13, 1.0, 1e-14));
        // quadratic decay: Kahan fires a step earlier than Plain would
        assert!(check_stop(StopMode::Kahan, Some(1e-6), 1e-12, 1.0, 1e-14));
        assert!(!check_stop(StopMode::Plain, Some(1e-6), 1e-12, 1.0, 1e-14));
        // non-decreasing updates fall back to Plain
        assert!(!check_stop(StopMode::Kahan, Some(1e-3), 1e-3, 1.0, 1e-14));
        assert!(check_stop(StopMode::Kahan, Some(0.0), 0.0, 0.0, 1e-14));
        assert!(!check_stop(StopMode::Plain, None, f64::NAN, 1.0, 1e-14));
    }
}
