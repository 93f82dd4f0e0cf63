//! The guarded doubling loop and the fixed-Q baselines.

use alloc::vec::Vec;

use crate::doubling::{check_stop, step, Kernel, StepOutcome, StopMode};
use crate::eigapp::{deflating_residual, nres2};
use crate::error::{Error, Result, Stage};
use crate::init::{closed_form_init, reduce_with_fallback, reinit, Idea, Variant};
use crate::qguard::{guard, ActionKind, GuardAction, GuardConfig, GuardReport};
use crate::sfq::{primal_nme_residual, GeneralPencil, SfqPencil};
use crate::densela::{ComplexMatrix, Permutation};

#[derive(Clone, Debug, PartialEq)]
pub struct QdaConfig {
    pub rtol: f64,
    pub max_iter: usize,
    pub stop_mode: StopMode,
    pub guard: GuardConfig,
    pub init_idea: Idea,
    pub init_variant: Variant,
    /// Require a small eigen-residual before accepting the stop rule.
    pub residual_safeguard: bool,
    /// Force a kernel; `None` picks W when n ≤ m, W̃ otherwise.
    pub kernel: Option<Kernel>,
    /// Keep every accepted pencil in [`QdaResult::iterates`].
    pub keep_iterates: bool,
}

impl Default for QdaConfig {
    fn default() -> Self {
        Self {
            rtol: 1e-14,
            max_iter: 50,
            stop_mode: StopMode::Kahan,
            guard: GuardConfig::default(),
            init_idea: Idea::Three,
            init_variant: Variant::AFirst,
            residual_safeguard: true,
            kernel: None,
            keep_iterates: false,
        }
    }
}

impl QdaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rtol > 0.0) {
            return Err(Error::InvalidArgument("rtol must be positive"));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidArgument("max_iter must be at least 1"));
        }
        if let Some(t) = self.guard.tau {
            if !(t > 1.0) {
                return Err(Error::InvalidArgument("tau must exceed 1"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    Converged,
    MaxIter,
    Breakdown,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Converged => "Converged",
            Status::MaxIter => "MaxIter",
            Status::Breakdown => "Breakdown",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    /// 1-based doubling step.
    pub index: usize,
    /// ‖Xᵢ₊₁ − Xᵢ‖_F.
    pub abs_update_x: f64,
    /// ‖Xᵢ₊₁ − Xᵢ‖_F / ‖Xᵢ₊₁‖_F.
    pub rel_update_x: f64,
    /// Frobenius norms of E, F, X, Y after the guard.
    pub norms_efxy: [f64; 4],
    pub w_condition: f64,
    pub w_min_pivot: f64,
    pub kernel: Kernel,
    pub guard: GuardReport,
}

#[derive(Clone, Debug)]
pub struct QdaResult {
    pub m: usize,
    pub n: usize,
    pub phi: ComplexMatrix,
    pub psi: ComplexMatrix,
    pub q1: Permutation,
    pub q2: Permutation,
    pub history: Vec<IterationRecord>,
    pub status: Status,
    /// Why the run stopped early, when `status` is Breakdown.
    pub breakdown: Option<Error>,
    /// Residual checked by the safeguard at the last stop-rule hit.
    pub safeguard_residual: Option<f64>,
    /// Initial pencil (after the initial guard pass) and, with
    /// `keep_iterates`, every accepted iterate after it.
    pub iterates: Vec<SfqPencil>,
    pub final_pencil: SfqPencil,
}

impl QdaResult {
    pub fn iterations(&self) -> usize {
        self.history.len()
    }

    /// Q₁ᵀ[I; Φ].
    pub fn stable_basis(&self) -> ComplexMatrix {
        self.final_pencil.stable_basis()
    }

    /// Q₂ᵀ[Ψ; I].
    pub fn anti_stable_basis(&self) -> ComplexMatrix {
        self.final_pencil.anti_stable_basis()
    }
}

/// Residual used by the safeguard: NRes₂ when B = I, otherwise the primal
/// equation residual in the current Q coordinates.
pub fn safeguard_residual(g: &GeneralPencil, p: &SfqPencil) -> f64 {
    let z = p.stable_basis();
    if g.b.is_identity() {
        return nres2(&g.a, &z).unwrap_or(f64::INFINITY);
    }
    match closed_form_init(g, &p.q1, &p.q2).and_then(|p0| primal_nme_residual(&p0, &p.x)) {
        Ok(r) => r,
        Err(_) => deflating_residual(&g.a, &g.b, &z).unwrap_or(f64::INFINITY),
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Guarded,
    Fixed(Kernel),
}

/// Guarded doubling on a general pencil: pivoted initialization, then
/// doubling with τ-guard after every step.
pub fn run_qda(g: &GeneralPencil, cfg: &QdaConfig) -> Result<QdaResult> {
    cfg.validate()?;
    let rep = reduce_with_fallback(g, cfg.init_idea, cfg.init_variant)?;
    iterate(rep.pencil, g, cfg, Mode::Guarded)
}

/// Guarded doubling from a pencil already in SFQ form.
pub fn run_qda_sfq(p0: &SfqPencil, cfg: &QdaConfig) -> Result<QdaResult> {
    cfg.validate()?;
    iterate(p0.clone(), &p0.assemble(), cfg, Mode::Guarded)
}

/// Fixed-Q baseline with Q₁ = Q₂ = I.
pub fn run_sdasf1(p0: &SfqPencil, cfg: &QdaConfig) -> Result<QdaResult> {
    cfg.validate()?;
    if !p0.is_sf1() {
        return Err(Error::InvalidArgument("run_sdasf1 needs Q1·Q2ᵀ = I"));
    }
    iterate(p0.clone(), &p0.assemble(), cfg, Mode::Fixed(Kernel::Sf1))
}

/// Fixed-Q baseline with Q₁Q₂ᵀ = Π (m = n).
pub fn run_sdasf2(p0: &SfqPencil, cfg: &QdaConfig) -> Result<QdaResult> {
    cfg.validate()?;
    if !p0.is_sf2() {
        return Err(Error::InvalidArgument("run_sdasf2 needs m = n and Q1·Q2ᵀ = Π"));
    }
    iterate(p0.clone(), &p0.assemble(), cfg, Mode::Fixed(Kernel::Sf2))
}

fn other_kernel(k: Kernel) -> Kernel {
    match k {
        Kernel::W => Kernel::WTilde,
        _ => Kernel::W,
    }
}

/// One step with the recovery ladder: reinit once, then the other kernel once.
fn guarded_step(p: &SfqPencil, kernel: Kernel, cfg: &QdaConfig) -> Result<(SfqPencil, StepOutcome, Option<GuardAction>)> {
    match step(p, kernel) {
        Ok(o) => return Ok((p.clone(), o, None)),
        Err(Error::Breakdown(Stage::Kernel)) => {}
        Err(e) => return Err(e),
    }
    let before = p.max_abs_xy();
    let base = match reinit(p, cfg.guard.idea, cfg.guard.variant) {
        Ok(rep) => rep.pencil,
        Err(_) => p.clone(),
    };
    let action = GuardAction {
        kind: ActionKind::Reinit,
        pivot: (0, 0),
        max_before: before,
        max_after: base.max_abs_xy(),
    };
    for k in [kernel, other_kernel(kernel)] {
        if let Ok(o) = step(&base, k) {
            return Ok((base, o, Some(action)));
        }
    }
    Err(Error::Breakdown(Stage::Kernel))
}

fn iterate(p0: SfqPencil, g: &GeneralPencil, cfg: &QdaConfig, mode: Mode) -> Result<QdaResult> {
    let mut p = p0;
    if mode == Mode::Guarded {
        p = match guard(&p, &cfg.guard) {
            Ok((q, _)) => q,
            Err(_) => p,
        };
    }
    let mut iterates = alloc::vec![p.clone()];
    let mut history = Vec::new();
    let mut prev_delta: Option<f64> = None;
    let mut status = Status::MaxIter;
    let mut breakdown = None;
    let mut safeguard = None;
    for i in 1..=cfg.max_iter {
        let (base, out, recovery) = match mode {
            Mode::Guarded => {
                let kernel = cfg.kernel.unwrap_or_else(|| Kernel::auto(p.m, p.n));
                match guarded_step(&p, kernel, cfg) {
                    Ok(t) => t,
                    Err(e @ Error::Breakdown(_)) => {
                        status = Status::Breakdown;
                        breakdown = Some(e);
                        break;
                    }
                    Err(e) => return Err(e),
                }
            }
            Mode::Fixed(kernel) => match step(&p, kernel) {
                Ok(o) => (p.clone(), o, None),
                Err(e @ Error::Breakdown(_)) => {
                    status = Status::Breakdown;
                    breakdown = Some(e);
                    break;
                }
                Err(e) => return Err(e),
            },
        };
        let next = out.next;
        if !next.is_finite() {
            status = Status::Breakdown;
            breakdown = Some(Error::Breakdown(Stage::NonFinite(i)));
            break;
        }
        let delta = (&next.x - &base.x).norm_fro();
        let x_norm = next.x.norm_fro();
        let (accepted, mut report) = match mode {
            Mode::Guarded => match guard(&next, &cfg.guard) {
                Ok(t) => t,
                Err(_) => {
                    let rep = GuardReport {
                        still_violating: true,
                        ..GuardReport::default()
                    };
                    (next, rep)
                }
            },
            Mode::Fixed(_) => (next, GuardReport::default()),
        };
        if let Some(a) = recovery {
            report.actions.insert(0, a);
        }
        history.push(IterationRecord {
            index: i,
            abs_update_x: delta,
            rel_update_x: if x_norm > 0.0 { delta / x_norm } else if delta == 0.0 { 0.0 } else { f64::INFINITY },
            norms_efxy: [
                accepted.e.norm_fro(),
                accepted.f.norm_fro(),
                accepted.x.norm_fro(),
                accepted.y.norm_fro(),
            ],
            w_condition: out.condition,
            w_min_pivot: out.min_pivot,
            kernel: out.kernel,
            guard: report,
        });
        p = accepted;
        if cfg.keep_iterates {
            iterates.push(p.clone());
        }
        let stop = check_stop(cfg.stop_mode, prev_delta, delta, x_norm, cfg.rtol);
        prev_delta = Some(delta);
        if stop {
            if cfg.residual_safeguard {
                let r = safeguard_residual(g, &p);
                safeguard = Some(r);
                if r <= libm::sqrt(cfg.rtol) {
                    status = Status::Converged;
                    break;
                }
            } else {
                status = Status::Converged;
                break;
            }
        }
    }
    Ok(QdaResult {
        m: p.m,
        n: p.n,
        phi: p.x.clone(),
        psi: p.y.clone(),
        q1: p.q1.clone(),
        q2: p.q2.clone(),
        history,
        status,
        breakdown,
        safeguard_residual: safeguard,
        iterates,
        final_pencil: p,
    })
}
