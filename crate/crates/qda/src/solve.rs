//! One solver run on a general pencil, its residuals, and its output files.

use std::path::Path;
use std::time::Instant;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use qda_core::doubling::StopMode;
use qda_core::driver::{run_qda, run_sdasf1, run_sdasf2, QdaConfig, QdaResult, Status};
use qda_core::eigapp::{cayley, deflating_residual, nres1, nres2};
use qda_core::init::{closed_form_init, Idea, Variant};
use qda_core::qguard::GuardConfig;
use qda_core::sfq::GeneralPencil;
use qda_core::{Error, Permutation};

use crate::io::{write_csv, write_json, write_matrix, write_permutation};
use crate::{invalid, CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Qda,
    Sdasf1,
    Sdasf2,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Qda => "QDA",
            Algorithm::Sdasf1 => "SDASF1",
            Algorithm::Sdasf2 => "SDASF2",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum StopArg {
    Plain,
    Kahan,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
pub enum IdeaArg {
    #[value(name = "1")]
    #[serde(rename = "1")]
    One,
    #[value(name = "2")]
    #[serde(rename = "2")]
    Two,
    #[value(name = "3")]
    #[serde(rename = "3")]
    Three,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum VariantArg {
    Afirst,
    Bfirst,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SolveOptions {
    pub algorithm: Algorithm,
    pub gamma: f64,
    /// Skip the Cayley transform: the input already splits about the unit circle.
    pub disk: bool,
    pub rtol: f64,
    pub stop: StopArg,
    pub tau: Option<f64>,
    pub idea: IdeaArg,
    pub variant: VariantArg,
    pub max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::Qda,
            gamma: -1.0,
            disk: false,
            rtol: 1e-14,
            stop: StopArg::Kahan,
            tau: None,
            idea: IdeaArg::Three,
            variant: VariantArg::Afirst,
            max_iter: 50,
        }
    }
}

impl SolveOptions {
    pub fn config(&self) -> QdaConfig {
        let idea = match self.idea {
            IdeaArg::One => Idea::One,
            IdeaArg::Two => Idea::Two,
            IdeaArg::Three => Idea::Three,
        };
        let variant = match self.variant {
            VariantArg::Afirst => Variant::AFirst,
            VariantArg::Bfirst => Variant::BFirst,
        };
        QdaConfig {
            rtol: self.rtol,
            max_iter: self.max_iter,
            stop_mode: match self.stop {
                StopArg::Plain => StopMode::Plain,
                StopArg::Kahan => StopMode::Kahan,
            },
            guard: GuardConfig { tau: self.tau, idea, variant, ..GuardConfig::default() },
            init_idea: idea,
            init_variant: variant,
            keep_iterates: false,
            ..QdaConfig::default()
        }
    }
}

pub struct SolveOutcome {
    pub status: Status,
    /// Absent when the run broke down before producing an iterate.
    pub result: Option<QdaResult>,
    pub error: Option<String>,
    pub cpu_seconds: f64,
    /// NRes₁/NRes₂ need B = I; otherwise only the deflating residual is reported.
    pub nres1: Option<f64>,
    pub nres2: Option<f64>,
    pub deflating_residual: Option<f64>,
}

/// Shell exit code for a finished run.
pub fn exit_code(status: Status) -> u8 {
    match status {
        Status::Converged => 0,
        Status::MaxIter => 2,
        Status::Breakdown => 3,
    }
}

/// Errors that describe the input rather than the iteration.
fn is_usage_error(e: &Error) -> bool {
    matches!(e, Error::InvalidArgument(_) | Error::DimensionMismatch { .. })
}

fn run_algorithm(g: &GeneralPencil, opts: &SolveOptions, cfg: &QdaConfig) -> Result<(qda_core::Result<QdaResult>, f64)> {
    cfg.validate()?;
    if opts.algorithm == Algorithm::Sdasf2 && g.m != g.n {
        return Err(invalid("sdasf2 needs m = n"));
    }
    let start = Instant::now();
    let h = if opts.disk { g.clone() } else { cayley(g, opts.gamma)? };
    let id = Permutation::identity(g.dim());
    let run = match opts.algorithm {
        Algorithm::Qda => run_qda(&h, cfg),
        Algorithm::Sdasf1 => closed_form_init(&h, &id, &id).and_then(|p| run_sdasf1(&p, cfg)),
        Algorithm::Sdasf2 => {
            closed_form_init(&h, &Permutation::block_swap(g.m, g.n), &id).and_then(|p| run_sdasf2(&p, cfg))
        }
    };
    Ok((run, start.elapsed().as_secs_f64()))
}

pub fn solve(g: &GeneralPencil, opts: &SolveOptions) -> Result<SolveOutcome> {
    solve_with(g, opts, &opts.config())
}

pub fn solve_with(g: &GeneralPencil, opts: &SolveOptions, cfg: &QdaConfig) -> Result<SolveOutcome> {
    let (run, cpu_seconds) = run_algorithm(g, opts, cfg)?;
    let r = match run {
        Ok(r) => r,
        Err(e) if is_usage_error(&e) => return Err(CliError::Core(e)),
        Err(e) => {
            return Ok(SolveOutcome {
                status: Status::Breakdown,
                result: None,
                error: Some(e.to_string()),
                cpu_seconds,
                nres1: None,
                nres2: None,
                deflating_residual: None,
            })
        }
    };
    let z = r.stable_basis();
    let finite = z.is_finite();
    let (nres1_v, nres2_v) = if finite && g.b.is_identity() {
        (nres1(&g.a, &z, Some(r.phi.norm_fro())).ok(), nres2(&g.a, &z).ok())
    } else {
        (None, None)
    };
    let deflating = if finite { deflating_residual(&g.a, &g.b, &z).ok() } else { None };
    Ok(SolveOutcome {
        status: r.status,
        error: r.breakdown.as_ref().map(|e| e.to_string()),
        result: Some(r),
        cpu_seconds,
        nres1: nres1_v,
        nres2: nres2_v,
        deflating_residual: deflating,
    })
}

pub const HISTORY_HEADER: [&str; 3] = ["i", "absUpdateX", "relUpdateX"];

/// One row of history.csv.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistoryRow {
    pub i: usize,
    #[serde(rename = "absUpdateX")]
    pub abs_update_x: f64,
    #[serde(rename = "relUpdateX")]
    pub rel_update_x: f64,
}

pub fn history_rows(r: &QdaResult) -> Vec<HistoryRow> {
    r.history
        .iter()
        .map(|h| HistoryRow { i: h.index, abs_update_x: h.abs_update_x, rel_update_x: h.rel_update_x })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GuardActionRow {
    pub kind: String,
    pub pivot: [usize; 2],
    pub max_before: f64,
    pub max_after: f64,
}

/// Full per-step record for iterations.json.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct IterationRow {
    pub i: usize,
    pub abs_update_x: f64,
    pub rel_update_x: f64,
    pub norm_e: f64,
    pub norm_f: f64,
    pub norm_x: f64,
    pub norm_y: f64,
    pub w_condition: f64,
    pub w_min_pivot: f64,
    pub kernel: String,
    pub guard_actions: Vec<GuardActionRow>,
    pub still_violating: bool,
}

pub fn iteration_rows(r: &QdaResult) -> Vec<IterationRow> {
    r.history
        .iter()
        .map(|h| IterationRow {
            i: h.index,
            abs_update_x: h.abs_update_x,
            rel_update_x: h.rel_update_x,
            norm_e: h.norms_efxy[0],
            norm_f: h.norms_efxy[1],
            norm_x: h.norms_efxy[2],
            norm_y: h.norms_efxy[3],
            w_condition: h.w_condition,
            w_min_pivot: h.w_min_pivot,
            kernel: h.kernel.name().to_string(),
            guard_actions: h
                .guard
                .actions
                .iter()
                .map(|a| GuardActionRow {
                    kind: a.kind.name().to_string(),
                    pivot: [a.pivot.0, a.pivot.1],
                    max_before: a.max_before,
                    max_after: a.max_after,
                })
                .collect(),
            still_violating: h.guard.still_violating,
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Summary {
    pub algorithm: Algorithm,
    pub status: String,
    pub exit_code: u8,
    pub m: usize,
    pub n: usize,
    pub iterations: usize,
    pub x_norm_fro: Option<f64>,
    pub max_abs_x: Option<f64>,
    pub nres1: Option<f64>,
    pub nres2: Option<f64>,
    pub deflating_residual: Option<f64>,
    pub safeguard_residual: Option<f64>,
    pub cpu_seconds: f64,
    pub error: Option<String>,
}

pub fn summarize(g: &GeneralPencil, opts: &SolveOptions, o: &SolveOutcome) -> Summary {
    let r = o.result.as_ref();
    Summary {
        algorithm: opts.algorithm,
        status: o.status.name().to_string(),
        exit_code: exit_code(o.status),
        m: g.m,
        n: g.n,
        iterations: r.map_or(0, |r| r.iterations()),
        x_norm_fro: r.map(|r| r.phi.norm_fro()),
        max_abs_x: r.map(|r| r.phi.max_abs()),
        nres1: o.nres1,
        nres2: o.nres2,
        deflating_residual: o.deflating_residual,
        safeguard_residual: r.and_then(|r| r.safeguard_residual),
        cpu_seconds: o.cpu_seconds,
        error: o.error.clone(),
    }
}

/// Q1.json, X.json, Q2.json, Y.json, history.csv, iterations.json, summary.json.
pub fn write_outputs(dir: &Path, summary: &Summary, o: &SolveOutcome) -> Result<()> {
    if let Some(r) = &o.result {
        write_permutation(&dir.join("Q1.json"), &r.q1)?;
        write_permutation(&dir.join("Q2.json"), &r.q2)?;
        // a broken-down run returns its last finite iterate
        if r.phi.is_finite() && r.psi.is_finite() {
            write_matrix(&dir.join("X.json"), &r.phi)?;
            write_matrix(&dir.join("Y.json"), &r.psi)?;
        }
        write_csv(&dir.join("history.csv"), &HISTORY_HEADER, &history_rows(r))?;
        write_json(&dir.join("iterations.json"), &iteration_rows(r))?;
    }
    write_json(&dir.join("summary.json"), summary)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Residuals {
    pub nres1: Option<f64>,
    pub nres2: Option<f64>,
    pub deflating_residual: f64,
}

/// Residuals of a claimed stable basis `z` of A − λB. `x_norm` is ‖X‖_F when
/// `z` came from Q₁ᵀ[I; X].
pub fn residuals(
    a: &qda_core::ComplexMatrix,
    b: Option<&qda_core::ComplexMatrix>,
    z: &qda_core::ComplexMatrix,
    x_norm: Option<f64>,
) -> Result<Residuals> {
    let ident;
    let b = match b {
        Some(b) => b,
        None => {
            ident = qda_core::ComplexMatrix::identity(a.rows());
            &ident
        }
    };
    let (r1, r2) = if b.is_identity() { (Some(nres1(a, z, x_norm)?), Some(nres2(a, z)?)) } else { (None, None) };
    Ok(Residuals { nres1: r1, nres2: r2, deflating_residual: deflating_residual(a, b, z)? })
}
