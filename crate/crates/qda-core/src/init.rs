//! Bringing a general pencil into Q-standard form.
//!
//! Two routes: the closed form for a caller-chosen (Q₁, Q₂), and pivoted
//! elimination that picks Q₁, Q₂ itself so that the resulting X, Y stay small.
//! The elimination runs a reverse sweep on A (pivots fill the bottom-right
//! diagonal, entries above them are cleared) and a forward sweep on B (pivots
//! fill the top-left diagonal, entries below are cleared). Row operations hit
//! both matrices; column swaps on A build Q₁ and on B build Q₂. What is left is
//!
//! ```text
//! P·A·Q₁ᵀ = [[Ã₁₁, 0], [Ã₂₁, L]],   P·B·Q₂ᵀ = [[U, B₁₂], [0, B₂₂]]
//! ```
//!
//! with L lower and U upper triangular, and scaling the block rows by U⁻¹ and
//! L⁻¹ gives E, Y, X, F.

use alloc::vec::Vec;

use crate::densela::{lu_solve, tri_solve, ComplexMatrix, Permutation, C64};
use crate::error::{Error, Result, Stage};
use crate::sfq::{GeneralPencil, SfqPencil};

/// Relative threshold under which an elimination pivot counts as zero.
pub const PIVOT_TOL: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Idea {
    /// A-sweep pivots searched only in the bottom n rows (top m rows for a B-first sweep).
    One,
    /// Same phases, but the first sweep searches every unused row.
    Two,
    /// A- and B-steps alternate, each searching every unused row.
    Three,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    AFirst,
    BFirst,
}

impl Variant {
    pub fn other(self) -> Self {
        match self {
            Variant::AFirst => Variant::BFirst,
            Variant::BFirst => Variant::AFirst,
        }
    }
}

#[derive(Clone, Debug)]
pub struct InitReport {
    pub pencil: SfqPencil,
    pub idea: Idea,
    pub variant: Variant,
    pub max_abs_x: f64,
    pub max_abs_y: f64,
    /// Largest entry seen during elimination over the largest input entry.
    pub pivot_growth: f64,
    /// Failed attempts before this one when run through the fallback chain.
    pub fallbacks: usize,
}

/// Closed-form SFQ blocks for fixed (Q₁, Q₂).
///
/// With A·Q₁ᵀ = [Aᵢⱼ] and B·Q₂ᵀ = [Bᵢⱼ] partitioned at m,
/// `[[E, Y], [X, F]] = −[[B₁₁, −A₁₂], [B₂₁, −A₂₂]]⁻¹ · [[−A₁₁, B₁₂], [−A₂₁, B₂₂]]`.
/// Fails with `Breakdown(ClosedForm)` when the (Q₁, Q₂) pair is inadmissible.
pub fn closed_form_init(g: &GeneralPencil, q1: &Permutation, q2: &Permutation) -> Result<SfqPencil> {
    let (m, n) = (g.m, g.n);
    let big = m + n;
    let a = q1.apply_cols(&g.a, true)?;
    let b = q2.apply_cols(&g.b, true)?;
    let mut k = ComplexMatrix::zeros(big, big);
    let mut rhs = ComplexMatrix::zeros(big, big);
    k.set_block(0, 0, &b.block(0, 0, big, m));
    k.set_block(0, m, &-&a.block(0, m, big, n));
    rhs.set_block(0, 0, &-&a.block(0, 0, big, m));
    rhs.set_block(0, m, &b.block(0, m, big, n));
    let s = match lu_solve(&k, &rhs) {
        Ok(s) => -&s,
        Err(Error::SingularMatrix { .. }) => return Err(Error::Breakdown(Stage::ClosedForm)),
        Err(e) => return Err(e),
    };
    SfqPencil::new(
        s.block(0, 0, m, m),
        s.block(m, m, n, n),
        s.block(m, 0, n, m),
        s.block(0, m, m, n),
        q1.clone(),
        q2.clone(),
    )
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Window {
    /// The first sweep's own band: bottom n rows for A, top m rows for B.
    Band,
    /// All rows not yet used as pivot rows.
    Unused,
}

struct Elim {
    a: ComplexMatrix,
    b: ComplexMatrix,
    col_a: Vec<usize>,
    col_b: Vec<usize>,
    m: usize,
    n: usize,
    ka: usize,
    kb: usize,
    tol_a: f64,
    tol_b: f64,
    scale: f64,
    peak: f64,
}

impl Elim {
    fn new(g: &GeneralPencil) -> Self {
        let big = g.dim();
        let ma = g.a.max_abs();
        let mb = g.b.max_abs();
        Self {
            a: g.a.clone(),
            b: g.b.clone(),
            col_a: (0..big).collect(),
            col_b: (0..big).collect(),
            m: g.m,
            n: g.n,
            ka: 0,
            kb: 0,
            tol_a: PIVOT_TOL * ma,
            tol_b: PIVOT_TOL * mb,
            scale: ma.max(mb),
            peak: ma.max(mb),
        }
    }

    fn big(&self) -> usize {
        self.m + self.n
    }

    fn note_growth(&mut self) {
        self.peak = self.peak.max(self.a.max_abs()).max(self.b.max_abs());
    }

    fn swap_rows(&mut self, r: usize, s: usize) {
        self.a.swap_rows(r, s);
        self.b.swap_rows(r, s);
    }

    /// One reverse step on A: pivot to (p, p), p = N−1−ka, clear above.
    fn a_step(&mut self, window: Window) -> Result<()> {
        let big = self.big();
        let p = big - 1 - self.ka;
        let lo = match window {
            Window::Band => self.kb.max(self.m),
            Window::Unused => self.kb,
        };
        let (mut pr, mut pc, mut best) = (p, p, self.a[(p, p)].norm());
        for r in lo..=p {
            for c in 0..=p {
                let v = self.a[(r, c)].norm();
                if v > best {
                    best = v;
                    pr = r;
                    pc = c;
                }
            }
        }
        if !(best > self.tol_a) || best == 0.0 {
            return Err(Error::Breakdown(Stage::ReduceA(self.ka)));
        }
        self.swap_rows(pr, p);
        self.a.swap_cols(pc, p);
        self.col_a.swap(pc, p);
        let piv = self.a[(p, p)];
        let arow: Vec<C64> = self.a.row(p).to_vec();
        let brow: Vec<C64> = self.b.row(p).to_vec();
        for i in 0..p {
            let l = self.a[(i, p)] / piv;
            if l.re == 0.0 && l.im == 0.0 {
                continue;
            }
            for (dst, &s) in self.a.row_mut(i).iter_mut().zip(&arow) {
                *dst -= l * s;
            }
            self.a[(i, p)] = C64::new(0.0, 0.0);
            for (dst, &s) in self.b.row_mut(i).iter_mut().zip(&brow) {
                *dst -= l * s;
            }
        }
        self.ka += 1;
        self.note_growth();
        Ok(())
    }

    /// One forward step on B: pivot to (q, q), q = kb, clear below.
    fn b_step(&mut self, window: Window) -> Result<()> {
        let big = self.big();
        let q = self.kb;
        let hi = match window {
            Window::Band => (self.m - 1).min(big - 1 - self.ka),
            Window::Unused => big - 1 - self.ka,
        };
        let (mut pr, mut pc, mut best) = (q, q, self.b[(q, q)].norm());
        for r in q..=hi {
            for c in q..big {
                let v = self.b[(r, c)].norm();
                if v > best {
                    best = v;
                    pr = r;
                    pc = c;
                }
            }
        }
        if !(best > self.tol_b) || best == 0.0 {
            return Err(Error::Breakdown(Stage::ReduceB(self.kb)));
        }
        self.swap_rows(pr, q);
        self.b.swap_cols(pc, q);
        self.col_b.swap(pc, q);
        let piv = self.b[(q, q)];
        let arow: Vec<C64> = self.a.row(q).to_vec();
        let brow: Vec<C64> = self.b.row(q).to_vec();
        for i in q + 1..big {
            let l = self.b[(i, q)] / piv;
            if l.re == 0.0 && l.im == 0.0 {
                continue;
            }
            for (dst, &s) in self.b.row_mut(i).iter_mut().zip(&brow) {
                *dst -= l * s;
            }
            self.b[(i, q)] = C64::new(0.0, 0.0);
            for (dst, &s) in self.a.row_mut(i).iter_mut().zip(&arow) {
                *dst -= l * s;
            }
        }
        self.kb += 1;
        self.note_growth();
        Ok(())
    }

    fn finish(self, idea: Idea, variant: Variant) -> Result<InitReport> {
        let (m, n) = (self.m, self.n);
        let l = self.a.block(m, m, n, n);
        let u = self.b.block(0, 0, m, m);
        let x = -&tri_solve(&l, &self.a.block(m, 0, n, m), true)?;
        let f = tri_solve(&l, &self.b.block(m, m, n, n), true)?;
        let e = tri_solve(&u, &self.a.block(0, 0, m, m), false)?;
        let y = -&tri_solve(&u, &self.b.block(0, m, m, n), false)?;
        let q1 = Permutation::new(self.col_a).expect("column order");
        let q2 = Permutation::new(self.col_b).expect("column order");
        let pencil = SfqPencil::new(e, f, x, y, q1, q2)?;
        Ok(InitReport {
            max_abs_x: pencil.x.max_abs(),
            max_abs_y: pencil.y.max_abs(),
            pencil,
            idea,
            variant,
            pivot_growth: if self.scale > 0.0 { self.peak / self.scale } else { 1.0 },
            fallbacks: 0,
        })
    }
}

/// Pivoted reduction of `g` to SFQ form with the given strategy.
pub fn reduce(g: &GeneralPencil, idea: Idea, variant: Variant) -> Result<InitReport> {
    let mut el = Elim::new(g);
    let (m, n) = (g.m, g.n);
    match idea {
        Idea::One | Idea::Two => {
            let first = if idea == Idea::One { Window::Band } else { Window::Unused };
            match variant {
                Variant::AFirst => {
                    for _ in 0..n {
                        el.a_step(first)?;
                    }
                    for _ in 0..m {
                        el.b_step(Window::Unused)?;
                    }
                }
                Variant::BFirst => {
                    for _ in 0..m {
                        el.b_step(first)?;
                    }
                    for _ in 0..n {
                        el.a_step(Window::Unused)?;
                    }
                }
            }
        }
        Idea::Three => {
            let mut a_turn = variant == Variant::AFirst;
            while el.ka < n || el.kb < m {
                if (a_turn && el.ka < n) || el.kb == m {
                    el.a_step(Window::Unused)?;
                } else {
                    el.b_step(Window::Unused)?;
                }
                a_turn = !a_turn;
            }
        }
    }
    el.finish(idea, variant)
}

pub fn reduce_idea1(g: &GeneralPencil, variant: Variant) -> Result<InitReport> {
    reduce(g, Idea::One, variant)
}

pub fn reduce_idea2(g: &GeneralPencil, variant: Variant) -> Result<InitReport> {
    reduce(g, Idea::Two, variant)
}

pub fn reduce_idea3(g: &GeneralPencil, variant: Variant) -> Result<InitReport> {
    reduce(g, Idea::Three, variant)
}

/// Try `idea` first, then Idea 3 → 2 → 1, then the same chain with the other variant.
pub fn reduce_with_fallback(g: &GeneralPencil, idea: Idea, variant: Variant) -> Result<InitReport> {
    let mut order: Vec<(Idea, Variant)> = Vec::with_capacity(6);
    for v in [variant, variant.other()] {
        for i in [idea, Idea::Three, Idea::Two, Idea::One] {
            if !order.contains(&(i, v)) {
                order.push((i, v));
            }
        }
    }
    let mut first_err = None;
    for (attempt, &(i, v)) in order.iter().enumerate() {
        match reduce(g, i, v) {
            Ok(mut rep) => {
                rep.fallbacks = attempt;
                return Ok(rep);
            }
            Err(e @ Error::Breakdown(_)) => {
                first_err.get_or_insert(e);
            }
            Err(e) => return Err(e),
        }
    }
    Err(first_err.expect("at least one attempt"))
}

/// Re-run the pivoted reduction on the current iterate and fold the new
/// column order into Q₁, Q₂. The eigenspaces are unchanged.
pub fn reinit(p: &SfqPencil, idea: Idea, variant: Variant) -> Result<InitReport> {
    let g = GeneralPencil {
        a: p.structured_a(),
        b: p.structured_b(),
        m: p.m,
        n: p.n,
    };
    let mut rep = reduce_with_fallback(&g, idea, variant)?;
    rep.pencil.q1 = rep.pencil.q1.compose(&p.q1);
    rep.pencil.q2 = rep.pencil.q2.compose(&p.q2);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: usize, cols: usize, re: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_real(rows, cols, re).unwrap()
    }

    #[test]
    fn closed_form_scalar_example() {
        let g = GeneralPencil::new(m(2, 2, &[2.0, 0.0, -1.0, 1.0]), m(2, 2, &[1.0, -3.0, 0.0, 4.0]), 1, 1).unwrap();
        let id = Permutation::identity(2);
        let p = closed_form_init(&g, &id, &id).unwrap();
        assert_eq!(p.e, m(1, 1, &[2.0]));
        assert_eq!(p.y, m(1, 1, &[3.0]));
        assert_eq!(p.x, m(1, 1, &[1.0]));
        assert_eq!(p.f, m(1, 1, &[4.0]));
    }

    #[test]
    fn closed_form_detects_inadmissible_pair() {
        // B₁₁ = 0 and A₁₂ = 0 zero the first row of the mixed block
        let g = GeneralPencil::new(m(2, 2, &[1.0, 0.0, 1.0, 1.0]), m(2, 2, &[0.0, 1.0, 1.0, 1.0]), 1, 1).unwrap();
        let id = Permutation::identity(2);
        assert_eq!(closed_form_init(&g, &id, &id).unwrap_err(), Error::Breakdown(Stage::ClosedForm));
    }

    #[test]
    fn zero_b_breaks_down() {
        let g = GeneralPencil::new(ComplexMatrix::identity(2), ComplexMatrix::zeros(2, 2), 1, 1).unwrap();
        for idea in [Idea::One, Idea::Two, Idea::Three] {
            assert!(matches!(reduce(&g, idea, Variant::AFirst), Err(Error::Breakdown(_))));
        }
        assert!(matches!(reduce_with_fallback(&g, Idea::Three, Variant::AFirst), Err(Error::Breakdown(_))));
    }

    #[test]
    fn diagonal_pencil_keeps_identity_order() {
        let g = GeneralPencil::new(m(2, 2, &[0.5, 0.0, 0.0, 2.0]), ComplexMatrix::identity(2), 1, 1).unwrap();
        let rep = reduce(&g, Idea::Three, Variant::AFirst).unwrap();
        assert!(rep.pencil.q1.is_identity() && rep.pencil.q2.is_identity());
        assert_eq!(rep.pencil.x, m(1, 1, &[0.0]));
        assert_eq!(rep.pencil.f, m(1, 1, &[0.5]));
        assert_eq!(rep.pencil.e, m(1, 1, &[0.5]));
    }
}
