//! Keeping X and Y bounded: single-entry swap actions and escalation to a
//! full re-initialization.

use alloc::vec::Vec;

use crate::densela::{ComplexMatrix, SINGULARITY_TOL};
use crate::error::{Error, Result};
use crate::init::{reinit, Idea, Variant};
use crate::sfq::SfqPencil;

/// τ = max{10³, 10·√(nm + 1)}.
pub fn default_tau(m: usize, n: usize) -> f64 {
    let nm = (n as f64) * (m as f64) + 1.0;
    f64::max(1e3, 10.0 * libm::sqrt(nm))
}

#[derive(Clone, Debug, PartialEq)]
pub struct GuardConfig {
    /// Entry cap; `None` uses [`default_tau`].
    pub tau: Option<f64>,
    /// Actions tried per call before escalating; `None` means m + n.
    pub max_actions: Option<usize>,
    pub escalate_to_reinit: bool,
    pub enabled: bool,
    /// Strategy used when escalating.
    pub idea: Idea,
    pub variant: Variant,
}

impl Default for GuardConfig {
    fn default() -> Self {
        Self {
            tau: None,
            max_actions: None,
            escalate_to_reinit: true,
            enabled: true,
            idea: Idea::Three,
            variant: Variant::AFirst,
        }
    }
}

impl GuardConfig {
    pub fn disabled() -> Self {
        Self { enabled: false, ..Self::default() }
    }

    pub fn tau_for(&self, m: usize, n: usize) -> f64 {
        self.tau.unwrap_or_else(|| default_tau(m, n))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Which {
    X,
    Y,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ActionKind {
    ActionX,
    ActionY,
    Reinit,
}

impl ActionKind {
    pub fn name(self) -> &'static str {
        match self {
            ActionKind::ActionX => "ActionX",
            ActionKind::ActionY => "ActionY",
            ActionKind::Reinit => "Reinit",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GuardAction {
    pub kind: ActionKind,
    /// (j, ℓ) for actions; (0, 0) for a re-initialization.
    pub pivot: (usize, usize),
    pub max_before: f64,
    pub max_after: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct GuardReport {
    pub actions: Vec<GuardAction>,
    /// Set when the pencil still violates τ after all permitted actions.
    pub still_violating: bool,
}

impl GuardReport {
    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }
}

/// Largest |entry| of X and Y above τ. Ties go to X, then row-major order.
pub fn find_violation(p: &SfqPencil, tau: f64) -> Option<(Which, usize, usize, f64)> {
    let mut best: Option<(Which, usize, usize, f64)> = None;
    for (which, mat) in [(Which::X, &p.x), (Which::Y, &p.y)] {
        if let Some((j, l, v)) = mat.argmax_abs() {
            if v > tau && best.is_none_or(|(_, _, _, b)| v > b) {
                best = Some((which, j, l, v));
            }
        }
    }
    best
}

fn row_norm(a: &ComplexMatrix, j: usize) -> f64 {
    libm::sqrt(a.row(j).iter().map(|v| v.norm_sqr()).sum::<f64>())
}

/// Action (i): swap column ℓ and column m+j of [[E, 0], [-X, I]], restore the
/// structure by block elimination. With x = X(:, ℓ), h = E(:, ℓ), ξ = X(j, ℓ):
///
/// ```text
/// X̃ = X + (x + eⱼ)/ξ·[eₗᵀ − eⱼᵀX]     F̃ = F − (x + eⱼ)/ξ·eⱼᵀF
/// Ẽ = E + h/ξ·[eₗᵀ − eⱼᵀX]            Ỹ = Y − h/ξ·eⱼᵀF
/// ```
pub fn action_x(p: &SfqPencil, j: usize, l: usize) -> Result<SfqPencil> {
    if j >= p.n || l >= p.m {
        return Err(Error::InvalidArgument("action_x pivot out of range"));
    }
    let xi = p.x[(j, l)];
    if !(xi.norm() > SINGULARITY_TOL * row_norm(&p.x, j).max(1.0)) {
        return Err(Error::ZeroPivot { row: j, col: l });
    }
    let (m, n) = (p.m, p.n);
    // u = (x + eⱼ)/ξ, h/ξ, r = eₗᵀ − eⱼᵀX, s = eⱼᵀF
    let mut u: Vec<_> = (0..n).map(|i| p.x[(i, l)] / xi).collect();
    u[j] += 1.0 / xi;
    let hs: Vec<_> = (0..m).map(|i| p.e[(i, l)] / xi).collect();
    let mut r: Vec<_> = p.x.row(j).iter().map(|v| -v).collect();
    r[l] += 1.0;
    let s: Vec<_> = p.f.row(j).to_vec();
    let mut q = p.clone();
    for i in 0..n {
        for k in 0..m {
            q.x[(i, k)] += u[i] * r[k];
        }
        for k in 0..n {
            q.f[(i, k)] -= u[i] * s[k];
        }
    }
    for i in 0..m {
        for k in 0..m {
            q.e[(i, k)] += hs[i] * r[k];
        }
        for k in 0..n {
            q.y[(i, k)] -= hs[i] * s[k];
        }
    }
    // row j in closed form: the rank-one update cancels there when |ξ| is large
    for k in 0..m {
        q.x[(j, k)] = -p.x[(j, k)] / xi;
    }
    q.x[(j, l)] = 1.0 / xi;
    for k in 0..n {
        q.f[(j, k)] = -p.f[(j, k)] / xi;
    }
    q.q1.swap_entries(l, m + j);
    Ok(q)
}

/// Action (ii): swap column j and column m+ℓ of [[I, -Y], [0, F]]. With
/// y = Y(:, ℓ), h = F(:, ℓ), η = Y(j, ℓ):
///
/// ```text
/// Ỹ = Y + (y + eⱼ)/η·[eₗᵀ − eⱼᵀY]     Ẽ = E − (y + eⱼ)/η·eⱼᵀE
/// F̃ = F + h/η·[eₗᵀ − eⱼᵀY]            X̃ = X − h/η·eⱼᵀE
/// ```
pub fn action_y(p: &SfqPencil, j: usize, l: usize) -> Result<SfqPencil> {
    if j >= p.m || l >= p.n {
        return Err(Error::InvalidArgument("action_y pivot out of range"));
    }
    let eta = p.y[(j, l)];
    if !(eta.norm() > SINGULARITY_TOL * row_norm(&p.y, j).max(1.0)) {
        return Err(Error::ZeroPivot { row: j, col: l });
    }
    let (m, n) = (p.m, p.n);
    let mut u: Vec<_> = (0..m).map(|i| p.y[(i, l)] / eta).collect();
    u[j] += 1.0 / eta;
    let hs: Vec<_> = (0..n).map(|i| p.f[(i, l)] / eta).collect();
    let mut r: Vec<_> = p.y.row(j).iter().map(|v| -v).collect();
    r[l] += 1.0;
    let s: Vec<_> = p.e.row(j).to_vec();
    let mut q = p.clone();
    for i in 0..m {
        for k in 0..n {
            q.y[(i, k)] += u[i] * r[k];
        }
        for k in 0..m {
            q.e[(i, k)] -= u[i] * s[k];
        }
    }
    for i in 0..n {
        for k in 0..n {
            q.f[(i, k)] += hs[i] * r[k];
        }
        for k in 0..m {
            q.x[(i, k)] -= hs[i] * s[k];
        }
    }
    for k in 0..n {
        q.y[(j, k)] = -p.y[(j, k)] / eta;
    }
    q.y[(j, l)] = 1.0 / eta;
    for k in 0..m {
        q.e[(j, k)] = -p.e[(j, k)] / eta;
    }
    q.q2.swap_entries(j, m + l);
    Ok(q)
}

/// Apply actions until X and Y respect τ, escalating to a re-initialization
/// when the action budget runs out.
pub fn guard(p: &SfqPencil, cfg: &GuardConfig) -> Result<(SfqPencil, GuardReport)> {
    let mut report = GuardReport::default();
    if !cfg.enabled {
        return Ok((p.clone(), report));
    }
    let tau = cfg.tau_for(p.m, p.n);
    let budget = cfg.max_actions.unwrap_or(p.m + p.n);
    let mut cur = p.clone();
    for _ in 0..budget {
        let Some((which, j, l, v)) = find_violation(&cur, tau) else {
            return Ok((cur, report));
        };
        let (next, kind) = match which {
            Which::X => (action_x(&cur, j, l)?, ActionKind::ActionX),
            Which::Y => (action_y(&cur, j, l)?, ActionKind::ActionY),
        };
        report.actions.push(GuardAction {
            kind,
            pivot: (j, l),
            max_before: v,
            max_after: next.max_abs_xy(),
        });
        cur = next;
    }
    if find_violation(&cur, tau).is_none() {
        return Ok((cur, report));
    }
    if cfg.escalate_to_reinit {
        let before = cur.max_abs_xy();
        let rep = reinit(&cur, cfg.idea, cfg.variant)?;
        cur = rep.pencil;
        report.actions.push(GuardAction {
            kind: ActionKind::Reinit,
            pivot: (0, 0),
            max_before: before,
            max_after: cur.max_abs_xy(),
        });
    }
    report.still_violating = find_violation(&cur, tau).is_some();
    Ok((cur, report))
}
