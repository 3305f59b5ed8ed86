//! Replicate fan-out and the CSV/JSON artifacts of a bandit experiment.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::bandit::{run_ofu_glb_seeded, theoretical_regret_bound, GlbInstance, RegretBound, RunOutput};
use crate::error::{Error, Result};

pub const ROUNDS_HEADER: &str = "t,arm,index,reward,inst_regret,cum_regret,exact_cover,relaxed_cover";

/// Replicates `0..n` on streams `(seed, k)`, in replicate order whatever the pool size.
pub fn run_replicates(inst: &GlbInstance<f64>, horizon: usize, delta: f64, seed: u64, n: usize) -> Result<Vec<RunOutput<f64>>> {
    (0..n as u64).into_par_iter().map(|k| run_ofu_glb_seeded(inst, horizon, delta, seed, k)).collect()
}

/// One row per round, replicates concatenated in order.
pub fn rounds_csv(outs: &[RunOutput<f64>]) -> String {
    let parts: Vec<String> = outs
        .par_iter()
        .map(|o| {
            let mut s = String::with_capacity(o.rounds.len() * 64);
            for r in &o.rounds {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{}",
                    r.t,
                    r.arm,
                    r.index,
                    r.reward,
                    r.inst_regret,
                    r.cum_regret,
                    r.exact_cover as u8,
                    r.relaxed_cover as u8
                );
            }
            s
        })
        .collect();
    let mut out = String::from(ROUNDS_HEADER);
    out.push('\n');
    parts.iter().for_each(|p| out.push_str(p));
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quantiles {
    pub min: f64,
    pub q10: f64,
    pub q50: f64,
    pub q90: f64,
    pub max: f64,
    pub mean: f64,
}

impl Quantiles {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let q = |p: f64| {
            let h = p * (v.len() - 1) as f64;
            let (i, f) = (h.floor() as usize, h.fract());
            if i + 1 < v.len() {
                v[i] + f * (v[i + 1] - v[i])
            } else {
                v[i]
            }
        };
        Some(Quantiles {
            min: v[0],
            q10: q(0.1),
            q50: q(0.5),
            q90: q(0.9),
            max: v[v.len() - 1],
            mean: v.iter().sum::<f64>() / v.len() as f64,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InstanceConstants {
    pub dim: usize,
    pub arms: usize,
    pub s0: f64,
    pub s1: f64,
    pub s2: f64,
    pub c1: f64,
    pub c2: f64,
    pub l: f64,
    pub k: f64,
    pub m: f64,
    pub c: f64,
    pub best_arm: usize,
    pub kappa: f64,
}

impl InstanceConstants {
    pub fn of(inst: &GlbInstance<f64>) -> Self {
        InstanceConstants {
            dim: inst.dim(),
            arms: inst.arms.len(),
            s0: inst.s0,
            s1: inst.s1,
            s2: inst.s2,
            c1: inst.c1,
            c2: inst.c2,
            l: inst.l,
            k: inst.k,
            m: inst.m,
            c: inst.c_factor(),
            best_arm: inst.best_arm,
            kappa: inst.kappa,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub horizon: usize,
    pub replicates: usize,
    pub seed: u64,
    pub delta: f64,
    pub constants: InstanceConstants,
    pub bound: RegretBound<f64>,
    /// Cumulative regret at the horizon across replicates.
    pub regret: Option<Quantiles>,
    /// Fraction of replicates whose exact confidence sets covered `theta*` at every round.
    pub coverage_rate: f64,
    pub relaxed_coverage_rate: f64,
    /// Covered replicates whose cumulative regret exceeded the bound.
    pub bound_violations: usize,
    pub outside_ball_rounds: usize,
    pub nonconverged_fits: usize,
    pub newton_iters: usize,
    pub aborted: Vec<String>,
    pub ok: bool,
}

pub fn summarize(inst: &GlbInstance<f64>, outs: &[RunOutput<f64>], horizon: usize, delta: f64, seed: u64) -> Summary {
    let n = outs.len().max(1) as f64;
    let bound = theoretical_regret_bound(inst, horizon, delta);
    // Cumulative regret never decreases, so the final value decides.
    let total = bound.total;
    let finals: Vec<f64> = outs.iter().filter(|o| o.diagnostics.aborted.is_none()).map(|o| o.regret()).collect();
    let covered = outs.iter().filter(|o| o.all_covered).count();
    let relaxed = outs
        .iter()
        .filter(|o| o.diagnostics.aborted.is_none() && o.rounds.iter().all(|r| r.relaxed_cover))
        .count();
    let bound_violations = outs.iter().filter(|o| o.all_covered && o.regret() > total).count();
    let aborted: Vec<String> = outs
        .iter()
        .enumerate()
        .filter_map(|(k, o)| o.diagnostics.aborted.as_ref().map(|m| format!("replicate {k}: {m}")))
        .collect();
    Summary {
        horizon,
        replicates: outs.len(),
        seed,
        delta,
        constants: InstanceConstants::of(inst),
        bound,
        regret: Quantiles::of(&finals),
        coverage_rate: covered as f64 / n,
        relaxed_coverage_rate: relaxed as f64 / n,
        bound_violations,
        outside_ball_rounds: outs.iter().map(|o| o.diagnostics.outside_ball).sum(),
        nonconverged_fits: outs.iter().map(|o| o.diagnostics.nonconverged_fits).sum(),
        newton_iters: outs.iter().map(|o| o.diagnostics.newton_iters).sum(),
        ok: bound_violations == 0 && aborted.is_empty(),
        aborted,
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path.display().to_string(), e))
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::invalid(format!("serializing report: {e}")))?;
    text.push('\n');
    write_text(path, &text)
}
