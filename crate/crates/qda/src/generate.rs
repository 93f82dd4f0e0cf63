//! Instance families on disk: A.json, B.json, optional ground truth, and a
//! manifest that regenerates them bit for bit.

use std::path::Path;

use serde::{Deserialize, Serialize};

use qda_core::problems::{gen_bse_like, gen_critical, gen_random_split, CriticalSpec, ProblemInstance};
use qda_core::C64;

use crate::io::{read_json, write_json, write_matrix};
use crate::manifest::RunManifest;
use crate::{invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleBlock {
    /// Half-size m_j of the Jordan block J_{2m_j}(ω).
    pub size: usize,
    pub re: f64,
    pub im: f64,
}

impl std::str::FromStr for CircleBlock {
    type Err = String;

    /// `SIZE:RE:IM`, e.g. `2:1:0` for J₄(1).
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected SIZE:RE:IM, got {s:?}"));
        }
        let size = parts[0].parse().map_err(|e| format!("block size: {e}"))?;
        let re = parts[1].parse().map_err(|e| format!("block re: {e}"))?;
        let im = parts[2].parse().map_err(|e| format!("block im: {e}"))?;
        Ok(Self { size, re, im })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "camelCase", rename_all_fields = "camelCase")]
pub enum GenSpec {
    Split { m: usize, n: usize, alpha: f64, eta: f64 },
    Bse { n: usize, gap_scale: f64 },
    Critical { m_prime: usize, n_prime: usize, blocks: Vec<CircleBlock>, rho_stable: f64, rho_anti: f64 },
}

impl GenSpec {
    pub fn generate(&self, seed: u64) -> Result<ProblemInstance> {
        Ok(match self {
            GenSpec::Split { m, n, alpha, eta } => gen_random_split(*m, *n, *alpha, *eta, seed)?,
            GenSpec::Bse { n, gap_scale } => gen_bse_like(*n, *gap_scale, seed)?,
            GenSpec::Critical { .. } => gen_critical(&self.critical_spec().unwrap(), seed)?,
        })
    }

    pub fn critical_spec(&self) -> Option<CriticalSpec> {
        match self {
            GenSpec::Critical { m_prime, n_prime, blocks, rho_stable, rho_anti } => Some(CriticalSpec {
                m_prime: *m_prime,
                n_prime: *n_prime,
                blocks: blocks.iter().map(|b| (b.size, C64::new(b.re, b.im))).collect(),
                rho_stable: *rho_stable,
                rho_anti: *rho_anti,
            }),
            _ => None,
        }
    }
}

fn pairs(v: &[C64]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

/// Dimensions and known spectra, written next to the matrices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InstanceInfo {
    pub m: usize,
    pub n: usize,
    pub stable_eigs: Vec<[f64; 2]>,
    pub anti_stable_eigs: Vec<[f64; 2]>,
    pub circle_eigs: Vec<[f64; 2]>,
    /// Z.json (stable basis) and M.json (A·Z = B·Z·M) are present.
    pub has_ground_truth: bool,
}

pub fn write_instance(dir: &Path, inst: &ProblemInstance) -> Result<InstanceInfo> {
    let g = &inst.pencil;
    write_matrix(&dir.join("A.json"), &g.a)?;
    write_matrix(&dir.join("B.json"), &g.b)?;
    let mut has_ground_truth = false;
    if let (Some(z), Some(m)) = (&inst.true_basis_stable, &inst.true_m) {
        write_matrix(&dir.join("Z.json"), z)?;
        write_matrix(&dir.join("M.json"), m)?;
        has_ground_truth = true;
    }
    let info = InstanceInfo {
        m: g.m,
        n: g.n,
        stable_eigs: pairs(&inst.stable_eigs),
        anti_stable_eigs: pairs(&inst.anti_stable_eigs),
        circle_eigs: pairs(&inst.circle_eigs),
        has_ground_truth,
    };
    write_json(&dir.join("instance.json"), &info)?;
    Ok(info)
}

pub fn cmd_gen(spec: &GenSpec, seed: u64, out: &Path) -> Result<InstanceInfo> {
    let params = serde_json::to_value(spec).map_err(|e| invalid(e.to_string()))?;
    let manifest = RunManifest::start("gen", params, Some(seed));
    let inst = spec.generate(seed)?;
    let info = write_instance(out, &inst)?;
    write_json(&out.join("manifest.json"), &manifest.finish())?;
    Ok(info)
}

/// Rerun a `gen` manifest into `out`.
pub fn cmd_replay(manifest: &Path, out: &Path) -> Result<InstanceInfo> {
    let m: RunManifest = read_json(manifest)?;
    if m.command != "gen" {
        return Err(invalid(format!("manifest is for {:?}, not gen", m.command)));
    }
    let spec: GenSpec = serde_json::from_value(m.parameters).map_err(|e| invalid(format!("manifest parameters: {e}")))?;
    let seed = m.seed.ok_or_else(|| invalid("manifest has no seed"))?;
    cmd_gen(&spec, seed, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_json_shape() {
        let s = GenSpec::Bse { n: 4, gap_scale: 2.0 };
        let v = serde_json::to_value(&s).unwrap();
        assert_eq!(v["family"], "bse");
        assert_eq!(v["gapScale"], 2.0);
        assert_eq!(serde_json::from_value::<GenSpec>(v).unwrap(), s);
    }

    #[test]
    fn block_parsing() {
        let b: CircleBlock = "2:1:0".parse().unwrap();
        assert_eq!(b, CircleBlock { size: 2, re: 1.0, im: 0.0 });
        assert!("2:1".parse::<CircleBlock>().is_err());
    }
}
