//! Batch runs: table.csv (one block of ‖X‖_F, CPU, NRes₁, NRes₂, #it'n rows
//! per seed and algorithm, one column per swept value), results.json, and a
//! per-run iteration history under history/.

use std::path::Path;

use clap::ValueEnum;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use qda_core::driver::{QdaResult, Status};
use qda_core::problems::ProblemInstance;
use qda_core::sfq::x_from_basis;
use qda_core::ComplexMatrix;

use crate::generate::{CircleBlock, GenSpec};
use crate::io::{write_csv, write_csv_records, write_json};
use crate::manifest::RunManifest;
use crate::solve::{history_rows, solve_with, Algorithm, SolveOptions, StopArg, HISTORY_HEADER};
use crate::{invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentName {
    #[value(name = "eta_sweep")]
    EtaSweep,
    #[value(name = "bse_like")]
    BseLike,
    #[value(name = "critical_rate")]
    CriticalRate,
}

pub const METRICS: [&str; 5] = ["‖X‖_F", "CPU", "NRes₁", "NRes₂", "#it'n"];

/// A run that stops without converging, or whose NRes₂ reaches this, is
/// failed ("--" in the table). Large ‖X‖_F alone is reported, not failed.
pub const FAIL_NRES2: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExperimentOptions {
    pub seed: u64,
    pub runs: usize,
    pub m: usize,
    pub n: usize,
    pub alpha: f64,
    pub etas: Vec<f64>,
    pub sizes: Vec<usize>,
    pub gap_scale: f64,
    pub m_prime: usize,
    pub n_prime: usize,
    pub block_sizes: Vec<usize>,
    pub rho: f64,
    pub rtol: Option<f64>,
    pub max_iter: Option<usize>,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        Self {
            seed: 1,
            runs: 3,
            m: 50,
            n: 60,
            alpha: 8.0,
            etas: vec![1e-4, 1e-5, 1e-6, 1e-7],
            sizes: vec![64],
            gap_scale: 2.0,
            m_prime: 3,
            n_prime: 3,
            block_sizes: vec![2],
            rho: 0.3,
            rtol: None,
            max_iter: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunRecord {
    pub param: String,
    pub seed: u64,
    pub algorithm: Algorithm,
    pub status: String,
    pub failed: bool,
    pub iterations: usize,
    pub x_norm_fro: Option<f64>,
    pub cpu_seconds: f64,
    pub nres1: Option<f64>,
    pub nres2: Option<f64>,
    pub deflating_residual: Option<f64>,
    pub error: Option<String>,
    /// ‖Xᵢ − Φᵢ‖_F against the ground truth in each iterate's own Q₁ (critical_rate only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub errors_x: Option<Vec<f64>>,
    #[serde(skip)]
    pub history: Vec<crate::solve::HistoryRow>,
}

struct Case {
    label: String,
    spec: GenSpec,
}

fn cases(name: ExperimentName, o: &ExperimentOptions) -> Vec<Case> {
    match name {
        ExperimentName::EtaSweep => o
            .etas
            .iter()
            .map(|&eta| Case { label: format!("eta={eta:e}"), spec: GenSpec::Split { m: o.m, n: o.n, alpha: o.alpha, eta } })
            .collect(),
        ExperimentName::BseLike => o
            .sizes
            .iter()
            .map(|&n| Case { label: format!("n={n}"), spec: GenSpec::Bse { n, gap_scale: o.gap_scale } })
            .collect(),
        ExperimentName::CriticalRate => o
            .block_sizes
            .iter()
            .map(|&k| Case {
                label: format!("m1={k}"),
                spec: GenSpec::Critical {
                    m_prime: o.m_prime,
                    n_prime: o.n_prime,
                    blocks: vec![CircleBlock { size: k, re: 1.0, im: 0.0 }],
                    rho_stable: o.rho,
                    rho_anti: o.rho,
                },
            })
            .collect(),
    }
}

fn algorithms(name: ExperimentName, inst: &ProblemInstance) -> Vec<Algorithm> {
    match name {
        ExperimentName::CriticalRate => vec![Algorithm::Qda],
        _ if inst.pencil.m == inst.pencil.n => vec![Algorithm::Qda, Algorithm::Sdasf1, Algorithm::Sdasf2],
        _ => vec![Algorithm::Qda, Algorithm::Sdasf1],
    }
}

fn solve_options(name: ExperimentName, o: &ExperimentOptions, algorithm: Algorithm) -> SolveOptions {
    let base = SolveOptions { algorithm, ..SolveOptions::default() };
    let s = match name {
        ExperimentName::EtaSweep => base,
        ExperimentName::BseLike => SolveOptions { rtol: 1e-12, ..base },
        // unit-circle eigenvalues, linear convergence: no Cayley, plain stop
        ExperimentName::CriticalRate => {
            SolveOptions { disk: true, stop: StopArg::Plain, rtol: 1e-10, max_iter: 30, ..base }
        }
    };
    SolveOptions { rtol: o.rtol.unwrap_or(s.rtol), max_iter: o.max_iter.unwrap_or(s.max_iter), ..s }
}

fn x_errors(r: &QdaResult, z: &ComplexMatrix) -> Option<Vec<f64>> {
    r.iterates
        .iter()
        .map(|p| x_from_basis(&p.q1, z, p.m).ok().map(|phi| (&p.x - &phi).norm_fro()))
        .collect()
}

fn run_case(name: ExperimentName, o: &ExperimentOptions, case: &Case, seed: u64) -> Result<Vec<RunRecord>> {
    let inst = case.spec.generate(seed)?;
    let g = &inst.pencil;
    let mut out = Vec::new();
    for alg in algorithms(name, &inst) {
        let opts = solve_options(name, o, alg);
        let mut cfg = opts.config();
        cfg.keep_iterates = name == ExperimentName::CriticalRate;
        let s = solve_with(g, &opts, &cfg)?;
        let r = s.result.as_ref();
        let x_norm = r.map(|r| r.phi.norm_fro());
        let failed = s.status != Status::Converged
            || !x_norm.is_some_and(f64::is_finite)
            || s.nres2.is_some_and(|v| !(v < FAIL_NRES2));
        let errors_x = match (r, &inst.true_basis_stable) {
            (Some(r), Some(z)) if cfg.keep_iterates => x_errors(r, z),
            _ => None,
        };
        out.push(RunRecord {
            param: case.label.clone(),
            seed,
            algorithm: alg,
            status: s.status.name().to_string(),
            failed,
            iterations: r.map_or(0, |r| r.iterations()),
            x_norm_fro: x_norm,
            cpu_seconds: s.cpu_seconds,
            nres1: s.nres1,
            nres2: s.nres2,
            deflating_residual: s.deflating_residual,
            error: s.error.clone(),
            errors_x,
            history: r.map(history_rows).unwrap_or_default(),
        });
    }
    Ok(out)
}

pub fn run_experiment(name: ExperimentName, o: &ExperimentOptions) -> Result<Vec<RunRecord>> {
    if o.runs == 0 {
        return Err(invalid("need at least one run"));
    }
    let cases = cases(name, o);
    if cases.is_empty() {
        return Err(invalid("nothing to sweep"));
    }
    let jobs: Vec<(&Case, u64)> = cases
        .iter()
        .flat_map(|c| (0..o.runs as u64).map(move |k| (c, o.seed + k)))
        .collect();
    let per_job: Vec<Vec<RunRecord>> = jobs.par_iter().map(|(c, s)| run_case(name, o, c, *s)).collect::<Result<_>>()?;
    Ok(per_job.into_iter().flatten().collect())
}

fn sci(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.2e}"))
}

fn cell(r: &RunRecord, metric: usize) -> String {
    if r.failed {
        return "--".to_string();
    }
    match metric {
        0 => sci(r.x_norm_fro),
        1 => format!("{:.3e}", r.cpu_seconds),
        2 => sci(r.nres1),
        3 => sci(r.nres2),
        _ => r.iterations.to_string(),
    }
}

/// Header `seed,algorithm,metric,<param>...`; a "--" cell marks a failed run.
pub fn table(records: &[RunRecord]) -> (Vec<String>, Vec<Vec<String>>) {
    let mut params: Vec<&str> = Vec::new();
    let mut seeds: Vec<u64> = Vec::new();
    let mut algs: Vec<Algorithm> = Vec::new();
    for r in records {
        if !params.contains(&r.param.as_str()) {
            params.push(&r.param);
        }
        if !seeds.contains(&r.seed) {
            seeds.push(r.seed);
        }
        if !algs.contains(&r.algorithm) {
            algs.push(r.algorithm);
        }
    }
    let mut header = vec!["seed".to_string(), "algorithm".to_string(), "metric".to_string()];
    header.extend(params.iter().map(|p| p.to_string()));
    let mut rows = Vec::new();
    for &seed in &seeds {
        for &alg in &algs {
            for (k, metric) in METRICS.iter().enumerate() {
                let mut row = vec![seed.to_string(), alg.name().to_string(), metric.to_string()];
                for p in &params {
                    let hit = records.iter().find(|r| r.seed == seed && r.algorithm == alg && r.param == *p);
                    row.push(hit.map_or_else(String::new, |r| cell(r, k)));
                }
                rows.push(row);
            }
        }
    }
    (header, rows)
}

#[derive(Serialize)]
struct CriticalRow {
    i: usize,
    #[serde(rename = "absUpdateX")]
    abs_update_x: f64,
    #[serde(rename = "relUpdateX")]
    rel_update_x: f64,
    #[serde(rename = "errorX")]
    error_x: f64,
    #[serde(rename = "errorRatio")]
    error_ratio: f64,
    asymptotic: bool,
}

pub const CRITICAL_HISTORY_HEADER: [&str; 6] = ["i", "absUpdateX", "relUpdateX", "errorX", "errorRatio", "asymptotic"];

/// First iterate counted in the asymptotic window.
pub const WINDOW_START: usize = 5;

/// Iterates i ≥ WINDOW_START whose error is still above 10× the final plateau
/// (the perturbation floor of the Jordan blocks), contiguous from the start.
pub fn asymptotic_window(errors: &[f64]) -> std::ops::Range<usize> {
    let plateau = *errors.last().unwrap_or(&0.0);
    let end = (WINDOW_START..errors.len()).find(|&i| errors[i] <= 10.0 * plateau).unwrap_or(errors.len());
    WINDOW_START..end.max(WINDOW_START)
}

fn history_file(r: &RunRecord) -> String {
    let param: String = r.param.chars().filter(|c| *c != '=').collect();
    format!("{}_{}_seed{}.csv", r.algorithm.name().to_lowercase(), param, r.seed)
}

pub fn cmd_experiment(name: ExperimentName, o: &ExperimentOptions, out: &Path) -> Result<Vec<RunRecord>> {
    let params = serde_json::json!({ "name": name, "options": o });
    let manifest = RunManifest::start("experiment", params, Some(o.seed));
    let records = run_experiment(name, o)?;
    let (header, rows) = table(&records);
    write_csv_records(&out.join("table.csv"), &header, &rows)?;
    write_json(&out.join("results.json"), &records)?;
    let hist = out.join("history");
    for r in &records {
        let path = hist.join(history_file(r));
        match &r.errors_x {
            Some(e) => {
                let window = asymptotic_window(e);
                let rows: Vec<CriticalRow> = r
                    .history
                    .iter()
                    .map(|h| CriticalRow {
                        i: h.i,
                        abs_update_x: h.abs_update_x,
                        rel_update_x: h.rel_update_x,
                        error_x: e[h.i],
                        error_ratio: e[h.i] / e[h.i - 1],
                        asymptotic: window.contains(&h.i),
                    })
                    .collect();
                write_csv(&path, &CRITICAL_HISTORY_HEADER, &rows)?;
            }
            None => write_csv(&path, &HISTORY_HEADER, &r.history)?,
        }
    }
    write_json(&out.join("manifest.json"), &manifest.finish())?;
    Ok(records)
}
