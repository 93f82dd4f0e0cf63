//! Test-problem generators with known ground truth.
//!
//! Randomness comes from ChaCha8 seeded with `seed_from_u64(seed)`; every
//! matrix draws from its own stream (see the `STREAM_*` constants), so adding
//! a matrix to one family never perturbs the others.

use alloc::vec::Vec;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use crate::densela::{lu_factor, ComplexMatrix, LuFactor, C64};
use crate::eigapp::{cayley, cayley_map};
use crate::error::{Error, Result};
use crate::sfq::GeneralPencil;

const STREAM_U: u64 = 1;
const STREAM_T_UPPER: u64 = 2;
const STREAM_T_DIAG: u64 = 3;
const STREAM_BSE_A: u64 = 10;
const STREAM_BSE_B: u64 = 11;
const STREAM_CRIT_M: u64 = 20;
const STREAM_CRIT_N: u64 = 21;
const STREAM_CRIT_P: u64 = 22;
const STREAM_CRIT_U: u64 = 23;
const STREAM_LEFT: u64 = 30;
/// Retries after a failed solve shift every stream by this much.
const RETRY_STRIDE: u64 = 1 << 16;

/// Largest accepted 1-norm condition number for P and U in [`gen_critical`].
pub const CRITICAL_COND_MAX: f64 = 1e3;

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// randn(rows, cols) + i·randn(rows, cols): all real parts first, then all imaginary parts.
pub fn randn_complex(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let re: Vec<f64> = (0..rows * cols).map(|_| StandardNormal.sample(rng)).collect();
    let mut out = ComplexMatrix::zeros(rows, cols);
    for (z, r) in out.data_mut().iter_mut().zip(re) {
        let im: f64 = StandardNormal.sample(rng);
        *z = C64::new(r, im);
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct Eigenpairs {
    pub values: Vec<C64>,
    /// Column k is an eigenvector for `values[k]`.
    pub vectors: ComplexMatrix,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProblemInstance {
    pub pencil: GeneralPencil,
    /// Z with A·Z = B·Z·M spanning the m-dimensional (weakly) stable space.
    pub true_basis_stable: Option<ComplexMatrix>,
    pub true_m: Option<ComplexMatrix>,
    pub stable_eigs: Vec<C64>,
    pub anti_stable_eigs: Vec<C64>,
    pub circle_eigs: Vec<C64>,
    pub eigenpairs: Option<Eigenpairs>,
    pub seed: u64,
}

impl ProblemInstance {
    /// ‖AZ − BZM‖_F / (‖A‖_F‖Z‖_F).
    pub fn ground_truth_residual(&self) -> Option<f64> {
        let (z, mm) = (self.true_basis_stable.as_ref()?, self.true_m.as_ref()?);
        let g = &self.pencil;
        let r = (&(&g.a * z) - &(&(&g.b * z) * mm)).norm_fro();
        Some(r / (g.a.norm_fro() * z.norm_fro()))
    }

    /// max_k ‖Az − λBz‖ / ((‖A‖_F + |λ|‖B‖_F)‖z‖) over the known eigenpairs.
    pub fn max_eigenpair_residual(&self, a: &ComplexMatrix, b: &ComplexMatrix) -> Option<f64> {
        let ep = self.eigenpairs.as_ref()?;
        let (na, nb) = (a.norm_fro(), b.norm_fro());
        let mut worst: f64 = 0.0;
        for (k, &l) in ep.values.iter().enumerate() {
            let z = ComplexMatrix::new(ep.vectors.rows(), 1, ep.vectors.column(k)).ok()?;
            let r = (&(a * &z) - &(b * &z).scale(l)).norm_fro();
            worst = worst.max(r / ((na + l.norm() * nb) * z.norm_fro()));
        }
        Some(worst)
    }

    /// The Cayley-transformed instance (A − γB, A + γB). Eigenvectors are
    /// unchanged, eigenvalues map to (λ − γ)/(λ + γ) and M to (M + γI)⁻¹(M − γI).
    pub fn cayley_transformed(&self, gamma: f64) -> Result<Self> {
        let map = |v: &Vec<C64>| v.iter().map(|&l| cayley_map(l, gamma)).collect::<Vec<_>>();
        let mut out = self.clone();
        out.pencil = cayley(&self.pencil, gamma)?;
        out.stable_eigs = map(&self.stable_eigs);
        out.anti_stable_eigs = map(&self.anti_stable_eigs);
        out.circle_eigs = map(&self.circle_eigs);
        if let Some(ep) = out.eigenpairs.as_mut() {
            ep.values = map(&ep.values);
        }
        if let Some(mm) = &self.true_m {
            let shift = ComplexMatrix::identity(mm.rows()).scale_real(gamma);
            out.true_m = Some(lu_factor(&(mm + &shift))?.solve(&(mm - &shift))?);
        }
        Ok(out)
    }

    /// The pencil (L·A, L·B): same eigenpairs, B no longer the identity.
    pub fn left_multiplied(&self, l: &ComplexMatrix) -> Result<Self> {
        let g = &self.pencil;
        let mut out = self.clone();
        out.pencil = GeneralPencil::new(l.matmul(&g.a)?, l.matmul(&g.b)?, g.m, g.n)?;
        Ok(out)
    }

    /// Similarity by S = diag(δI_m, I_n): the stable basis's top block shrinks by δ.
    pub fn similarity_scaled(&self, delta: f64) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(Error::InvalidArgument("scaling factor must be positive"));
        }
        let m = self.pencil.m;
        let s = |i: usize| if i < m { delta } else { 1.0 };
        let conj = |a: &ComplexMatrix| ComplexMatrix::from_fn(a.rows(), a.cols(), |i, j| a[(i, j)] * (s(i) / s(j)));
        let rows = |a: &ComplexMatrix| ComplexMatrix::from_fn(a.rows(), a.cols(), |i, j| a[(i, j)] * s(i));
        let mut out = self.clone();
        out.pencil = GeneralPencil::new(conj(&self.pencil.a), conj(&self.pencil.b), m, self.pencil.n)?;
        out.true_basis_stable = self.true_basis_stable.as_ref().map(rows);
        if let Some(ep) = out.eigenpairs.as_mut() {
            ep.vectors = rows(&ep.vectors);
        }
        Ok(out)
    }
}

/// Right eigenvectors of an upper-triangular T by back-substitution.
/// Column k belongs to T[k][k] and has a unit k-th entry.
pub fn triangular_eigenvectors(t: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = t.rows();
    let mut v = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        let lk = t[(k, k)];
        v[(k, k)] = C64::new(1.0, 0.0);
        for j in (0..k).rev() {
            let mut s = C64::new(0.0, 0.0);
            for l in j + 1..=k {
                s += t[(j, l)] * v[(l, k)];
            }
            let d = t[(j, j)] - lk;
            if d.norm() == 0.0 {
                return Err(Error::SingularMatrix { pivot: j });
            }
            v[(j, k)] = -s / d;
        }
    }
    Ok(v)
}

/// A = U·T·U⁻¹, B = I, with T upper triangular and the first m diagonal
/// entries taken as the stable part. Z = U(:, 1:m), M = T(1:m, 1:m).
pub fn split_from_factors(u: &ComplexMatrix, t: &ComplexMatrix, m: usize, seed: u64) -> Result<ProblemInstance> {
    let nn = u.rows();
    if !u.is_square() || t.rows() != nn || !t.is_square() || m > nn {
        return Err(Error::DimensionMismatch { op: "split_from_factors", expected: nn, found: t.rows() });
    }
    let a = LuFactor::new(u)?.solve_right(&(u * t))?;
    let d = t.diag();
    let vectors = u * &triangular_eigenvectors(t)?;
    Ok(ProblemInstance {
        pencil: GeneralPencil::new(a, ComplexMatrix::identity(nn), m, nn - m)?,
        true_basis_stable: Some(u.block(0, 0, nn, m)),
        true_m: Some(t.block(0, 0, m, m)),
        stable_eigs: d[..m].to_vec(),
        anti_stable_eigs: d[m..].to_vec(),
        circle_eigs: Vec::new(),
        eigenpairs: Some(Eigenpairs { values: d, vectors }),
        seed,
    })
}

/// Random split-spectrum pencil: U = randn + i·randn, T = strict upper part of
/// randn + i·randn plus diag(2·rand(m) − α, 2·rand(n) + α) + i·diag(randn),
/// then U(1:m, 1:m) ← η·U(1:m, 1:m), A = UTU⁻¹, B = I.
pub fn gen_random_split(m: usize, n: usize, alpha: f64, eta: f64, seed: u64) -> Result<ProblemInstance> {
    if !(alpha > 2.0) {
        return Err(Error::InvalidArgument("alpha must exceed 2"));
    }
    if !(eta > 0.0) {
        return Err(Error::InvalidArgument("eta must be positive"));
    }
    if m == 0 || n == 0 {
        return Err(Error::InvalidArgument("m and n must be positive"));
    }
    let nn = m + n;
    let mut last = Error::InvalidArgument("no attempt made");
    for attempt in 0..8u64 {
        let off = attempt * RETRY_STRIDE;
        let mut u = randn_complex(nn, nn, &mut stream_rng(seed, STREAM_U + off));
        let mut t = randn_complex(nn, nn, &mut stream_rng(seed, STREAM_T_UPPER + off));
        let mut rd = stream_rng(seed, STREAM_T_DIAG + off);
        let unif = Uniform::new(0.0, 1.0);
        let re: Vec<f64> = (0..nn)
            .map(|k| {
                let r: f64 = unif.sample(&mut rd);
                if k < m { 2.0 * r - alpha } else { 2.0 * r + alpha }
            })
            .collect();
        for i in 0..nn {
            for j in 0..=i {
                t[(i, j)] = C64::new(0.0, 0.0);
            }
        }
        for (k, r) in re.into_iter().enumerate() {
            let im: f64 = StandardNormal.sample(&mut rd);
            t[(k, k)] = C64::new(r, im);
        }
        for i in 0..m {
            for j in 0..m {
                u[(i, j)] *= eta;
            }
        }
        match split_from_factors(&u, &t, m, seed) {
            Ok(p) => return Ok(p),
            Err(e) => last = e,
        }
    }
    Err(last)
}

/// A random nonsingular left factor I + G/(2√N), G = randn + i·randn.
pub fn random_left_factor(nn: usize, seed: u64) -> ComplexMatrix {
    let g = randn_complex(nn, nn, &mut stream_rng(seed, STREAM_LEFT));
    &ComplexMatrix::identity(nn) + &g.scale_real(0.5 / libm::sqrt(nn as f64))
}

/// H = [[A, B], [−B̄, −Ā]] with B = I.
pub fn bse_from_blocks(a: &ComplexMatrix, b: &ComplexMatrix, seed: u64) -> Result<ProblemInstance> {
    let n = a.rows();
    if !a.is_square() || b.rows() != n || !b.is_square() {
        return Err(Error::DimensionMismatch { op: "bse_from_blocks", expected: n, found: b.rows() });
    }
    let top = a.hstack(b)?;
    let bottom = (-&b.conj()).hstack(&(-&a.conj()))?;
    let h = top.vstack(&bottom)?;
    Ok(ProblemInstance {
        pencil: GeneralPencil::new(h, ComplexMatrix::identity(2 * n), n, n)?,
        true_basis_stable: None,
        true_m: None,
        stable_eigs: Vec::new(),
        anti_stable_eigs: Vec::new(),
        circle_eigs: Vec::new(),
        eigenpairs: None,
        seed,
    })
}

/// BSE-structured Hamiltonian of order 2n: A = D + K with D = diag(gapScale·(1..n)),
/// K Hermitian, B complex symmetric, scaled so ‖K‖₁ + ‖B‖₁ = gapScale/2. Every
/// eigenvalue then sits at least gapScale/2 away from the imaginary axis.
pub fn gen_bse_like(n: usize, gap_scale: f64, seed: u64) -> Result<ProblemInstance> {
    if !(gap_scale > 0.0) {
        return Err(Error::InvalidArgument("gapScale must be positive"));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive"));
    }
    let k0 = randn_complex(n, n, &mut stream_rng(seed, STREAM_BSE_A));
    let b0 = randn_complex(n, n, &mut stream_rng(seed, STREAM_BSE_B));
    let k = (&k0 + &k0.adjoint()).scale_real(0.5);
    let b = (&b0 + &b0.transpose()).scale_real(0.5);
    let s = 0.5 * gap_scale / (k.norm_one() + b.norm_one());
    let d: Vec<C64> = (1..=n).map(|j| C64::new(gap_scale * j as f64, 0.0)).collect();
    let a = &ComplexMatrix::from_diag(&d) + &k.scale_real(s);
    bse_from_blocks(&a, &b.scale_real(s), seed)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriticalSpec {
    pub m_prime: usize,
    pub n_prime: usize,
    /// Jordan half-sizes m_j and unimodular ω_j; each contributes J_{2m_j}(ω_j).
    pub blocks: Vec<(usize, C64)>,
    pub rho_stable: f64,
    pub rho_anti: f64,
}

impl CriticalSpec {
    pub fn n0(&self) -> usize {
        self.blocks.iter().map(|b| b.0).sum()
    }

    pub fn m(&self) -> usize {
        self.m_prime + self.n0()
    }

    pub fn n(&self) -> usize {
        self.n_prime + self.n0()
    }

    pub fn validate(&self) -> Result<()> {
        if self.blocks.is_empty() || self.blocks.iter().any(|b| b.0 == 0) {
            return Err(Error::InvalidArgument("need at least one nonempty circle block"));
        }
        if self.blocks.iter().any(|b| (b.1.norm() - 1.0).abs() > 1e-14) {
            return Err(Error::InvalidArgument("circle eigenvalues must be unimodular"));
        }
        if !(self.rho_stable > 0.0 && self.rho_stable < 1.0 && self.rho_anti > 0.0 && self.rho_anti < 1.0) {
            return Err(Error::InvalidArgument("spectral radii must lie in (0, 1)"));
        }
        Ok(())
    }
}

/// Upper triangular k×k with spectral radius exactly `rho`: diagonal moduli in
/// [rho/2, rho] (the first equal to rho), random phases, mild off-diagonal part.
fn stable_block(k: usize, rho: f64, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let unif = Uniform::new(0.0, 1.0);
    let mut t = randn_complex(k, k, rng).scale_real(0.1);
    for i in 0..k {
        for j in 0..i {
            t[(i, j)] = C64::new(0.0, 0.0);
        }
        let r: f64 = if i == 0 { rho } else { rho * (0.5 + 0.5 * unif.sample(rng)) };
        let th: f64 = 2.0 * core::f64::consts::PI * unif.sample(rng);
        t[(i, i)] = C64::from_polar(r, th);
    }
    t
}

fn well_conditioned(nn: usize, seed: u64, stream: u64) -> Result<(ComplexMatrix, LuFactor)> {
    for attempt in 0..1000u64 {
        let x = randn_complex(nn, nn, &mut stream_rng(seed, stream + attempt * RETRY_STRIDE));
        if let Ok(f) = LuFactor::new(&x) {
            if f.cond_one() <= CRITICAL_COND_MAX {
                return Ok((x, f));
            }
        }
    }
    Err(Error::InvalidArgument("no well-conditioned factor found"))
}

/// Uniformly random permutation of {0..n−1} (Fisher–Yates).
pub fn random_permutation(n: usize, rng: &mut ChaCha8Rng) -> crate::densela::Permutation {
    let mut p: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = Uniform::new_inclusive(0, i).sample(rng);
        p.swap(i, j);
    }
    crate::densela::Permutation::new(p).expect("shuffle of 0..n")
}

/// Explicit Jordan block J_p(ω).
pub fn jordan_block(p: usize, omega: C64) -> ComplexMatrix {
    ComplexMatrix::from_fn(p, p, |i, j| {
        if i == j {
            omega
        } else if j == i + 1 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Critical-case pencil from its Weierstrass form. With block order
/// [m′ | n₀ | n′ | n₀],
///
/// ```text
/// J_A = [[M, 0, 0, 0], [0, J₁, 0, Γ₀], [0, 0, I, 0], [0, 0, 0, J₁]]
/// J_B = diag(I, I, N, I)
/// ```
///
/// and A = P⁻¹J_A U⁻¹, B = P⁻¹J_B U⁻¹ for random P, U with condition estimate
/// at most [`CRITICAL_COND_MAX`]. The stable basis is U(:, 1:m).
pub fn gen_critical(spec: &CriticalSpec, seed: u64) -> Result<ProblemInstance> {
    spec.validate()?;
    let (mp, np, n0) = (spec.m_prime, spec.n_prime, spec.n0());
    let (m, n) = (mp + n0, np + n0);
    let nn = m + n;
    let ms = stable_block(mp, spec.rho_stable, &mut stream_rng(seed, STREAM_CRIT_M));
    let ns = stable_block(np, spec.rho_anti, &mut stream_rng(seed, STREAM_CRIT_N));

    let mut j1 = ComplexMatrix::zeros(n0, n0);
    let mut gamma0 = ComplexMatrix::zeros(n0, n0);
    let mut off = 0;
    for &(k, w) in &spec.blocks {
        j1.set_block(off, off, &jordan_block(k, w));
        gamma0[(off + k - 1, off)] = C64::new(1.0, 0.0);
        off += k;
    }
    let mut ja = ComplexMatrix::zeros(nn, nn);
    ja.set_block(0, 0, &ms);
    ja.set_block(mp, mp, &j1);
    ja.set_block(mp, m + np, &gamma0);
    ja.set_block(m, m, &ComplexMatrix::identity(np));
    ja.set_block(m + np, m + np, &j1);
    let mut jb = ComplexMatrix::identity(nn);
    jb.set_block(m, m, &ns);

    let (_, pf) = well_conditioned(nn, seed, STREAM_CRIT_P)?;
    let (u, uf) = well_conditioned(nn, seed, STREAM_CRIT_U)?;
    let a = pf.solve(&uf.solve_right(&ja)?)?;
    let b = pf.solve(&uf.solve_right(&jb)?)?;

    let mut true_m = ComplexMatrix::zeros(m, m);
    true_m.set_block(0, 0, &ms);
    true_m.set_block(mp, mp, &j1);
    let circle_eigs = spec
        .blocks
        .iter()
        .flat_map(|&(k, w)| core::iter::repeat_n(w, 2 * k))
        .collect();
    Ok(ProblemInstance {
        pencil: GeneralPencil::new(a, b, m, n)?,
        true_basis_stable: Some(u.block(0, 0, nn, m)),
        true_m: Some(true_m),
        stable_eigs: ms.diag(),
        anti_stable_eigs: ns.diag().into_iter().map(|v| C64::new(1.0, 0.0) / v).collect(),
        circle_eigs,
        eigenpairs: None,
        seed,
    })
}

fn cpow(w: C64, mut e: u64) -> C64 {
    let (mut acc, mut base) = (C64::new(1.0, 0.0), w);
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}

/// [J_p(ω)]^{2^i} in closed form: upper-triangular Toeplitz with
/// γ₁ = ω^{2^i} and γⱼ = C(2^i, j−1)·ω^{2^i−j+1}.
pub fn jordan_power(p: usize, omega: C64, i: u32) -> Result<ComplexMatrix> {
    if p == 0 {
        return Err(Error::InvalidArgument("Jordan block size must be positive"));
    }
    if i >= 63 {
        return Err(Error::Overflow);
    }
    let k = 1u64 << i;
    let mut gam = Vec::with_capacity(p);
    let mut coef = 1.0f64;
    for j in 1..=p as u64 {
        if j > 1 {
            // C(k, j−1) = C(k, j−2)·(k − j + 2)/(j − 1); zero once j − 1 > k
            coef = coef * (k as f64 - j as f64 + 2.0) / (j - 1) as f64;
        }
        let g = if coef == 0.0 { C64::new(0.0, 0.0) } else { cpow(omega, k + 1 - j).scale(coef) };
        if !(g.norm() <= 1e300) {
            return Err(Error::Overflow);
        }
        gam.push(g);
    }
    Ok(ComplexMatrix::from_fn(p, p, |r, c| if c >= r { gam[c - r] } else { C64::new(0.0, 0.0) }))
}

/// Γ_{i,k}: the top-right k×k block of [J_{2k}(ω)]^{2^i}. Γ_{0,k} = e_k e₁ᵀ.
pub fn gamma_block(k: usize, omega: C64, i: u32) -> Result<ComplexMatrix> {
    Ok(jordan_power(2 * k, omega, i)?.block(0, k, k, k))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(v: f64) -> C64 {
        C64::new(v, 0.0)
    }

    #[test]
    fn jordan_examples() {
        let j = jordan_power(2, re(1.0), 1).unwrap();
        assert_eq!(j, ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 0.0, 1.0]).unwrap());
        let j = jordan_power(3, re(1.0), 2).unwrap();
        assert_eq!(j, ComplexMatrix::from_real(3, 3, &[1.0, 4.0, 6.0, 0.0, 1.0, 4.0, 0.0, 0.0, 1.0]).unwrap());
        // 2^0 = 1: γ₂ = 1, higher terms vanish
        assert_eq!(jordan_power(3, re(2.0), 0).unwrap(), jordan_block(3, re(2.0)));
    }

    #[test]
    fn gamma_zero_is_corner() {
        let g = gamma_block(3, re(1.0), 0).unwrap();
        let mut want = ComplexMatrix::zeros(3, 3);
        want[(2, 0)] = re(1.0);
        assert_eq!(g, want);
    }

    #[test]
    fn jordan_overflow() {
        assert_eq!(jordan_power(2, re(10.0), 10).unwrap_err(), Error::Overflow);
    }

    #[test]
    fn tiny_split() {
        let u = ComplexMatrix::identity(2);
        let t = ComplexMatrix::from_real(2, 2, &[-3.0, 1.0, 0.0, 4.0]).unwrap();
        let p = split_from_factors(&u, &t, 1, 0).unwrap();
        assert_eq!(p.pencil.a, t);
        assert_eq!(p.true_basis_stable.unwrap(), ComplexMatrix::from_real(2, 1, &[1.0, 0.0]).unwrap());
        assert_eq!(p.true_m.unwrap(), ComplexMatrix::from_real(1, 1, &[-3.0]).unwrap());
    }

    #[test]
    fn triangular_eigvecs() {
        let t = ComplexMatrix::from_real(3, 3, &[1.0, 2.0, 3.0, 0.0, 4.0, 5.0, 0.0, 0.0, 6.0]).unwrap();
        let v = triangular_eigenvectors(&t).unwrap();
        let d = ComplexMatrix::from_diag(&t.diag());
        assert!((&(&t * &v) - &(&v * &d)).norm_fro() < 1e-13);
    }

    #[test]
    fn bse_zero_coupling() {
        let a = ComplexMatrix::from_real(2, 2, &[1.0, 0.5, 0.5, 2.0]).unwrap();
        let p = bse_from_blocks(&a, &ComplexMatrix::zeros(2, 2), 0).unwrap();
        assert_eq!(p.pencil.a.block(2, 2, 2, 2), -&a);
        assert_eq!(p.pencil.a.block(0, 2, 2, 2), ComplexMatrix::zeros(2, 2));
    }

    #[test]
    fn smallest_critical() {
        let spec = CriticalSpec {
            m_prime: 1,
            n_prime: 1,
            blocks: alloc::vec![(1, re(1.0))],
            rho_stable: 0.3,
            rho_anti: 0.3,
        };
        let p = gen_critical(&spec, 7).unwrap();
        assert_eq!(p.pencil.dim(), 4);
        assert_eq!(p.circle_eigs, alloc::vec![re(1.0), re(1.0)]);
        assert!(p.ground_truth_residual().unwrap() < 1e-12);
    }
}
