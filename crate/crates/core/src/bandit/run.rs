use rand::Rng;
use serde::Serialize;

use super::confidence::{exact_membership, optimistic_choice, relaxed_membership, ConfidenceState};
use super::GlbInstance;
use crate::error::{Error, Result};
use crate::glm::{fit_mle, ArmCounts, Design};
use crate::linalg::{dot, norm};
use crate::rng::stream;
use crate::scalar::Scalar;

/// Newton iterations allowed per refit.
pub const FIT_MAX_ITERS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RoundLog<T> {
    pub t: usize,
    pub arm: usize,
    pub index: T,
    pub reward: T,
    pub inst_regret: T,
    pub cum_regret: T,
    /// `theta*` lies in the exact confidence set built before this round.
    pub exact_cover: bool,
    pub relaxed_cover: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RunDiagnostics {
    /// Rounds whose estimate left the ball of radius `S0`. The estimate is never projected.
    pub outside_ball: usize,
    pub nonconverged_fits: usize,
    pub newton_iters: usize,
    /// Rounds where the warm start was infeasible and the fit restarted from zero.
    pub cold_restarts: usize,
    /// Set when the run stopped early; the message names the failing round.
    pub aborted: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunOutput<T> {
    pub rounds: Vec<RoundLog<T>>,
    pub diagnostics: RunDiagnostics,
    /// `theta*` stayed in every exact confidence set.
    pub all_covered: bool,
}

impl<T: Scalar> RunOutput<T> {
    pub fn regret(&self) -> T {
        self.rounds.last().map_or(T::zero(), |r| r.cum_regret)
    }

    /// Cumulative regret after `t` rounds.
    pub fn regret_at(&self, t: usize) -> T {
        match t {
            0 => T::zero(),
            t => self.rounds[t.min(self.rounds.len()) - 1].cum_regret,
        }
    }
}

/// Plays `horizon` rounds of the optimistic policy with the relaxed index.
pub fn run_ofu_glb<T: Scalar, R: Rng + ?Sized>(
    inst: &GlbInstance<T>,
    horizon: usize,
    delta: T,
    rng: &mut R,
) -> Result<RunOutput<T>> {
    if horizon == 0 {
        return Err(Error::invalid("horizon must be positive"));
    }
    let mut counts = ArmCounts::new(inst.arms.clone());
    let mut diag = RunDiagnostics::default();
    let mut rounds = Vec::with_capacity(horizon);
    let best_mean = inst.arm_mean(inst.best_arm)?;
    let lambda = inst.lambda(horizon, delta);
    let zero = vec![T::zero(); inst.dim()];
    let mut theta = zero.clone();
    let mut cum = T::zero();
    let mut all_covered = true;

    for t in 1..=horizon {
        let step = (|| -> Result<RoundLog<T>> {
            let feasible = counts
                .visit(&mut |i, x, _, _| inst.family.base.check(dot(x, &theta)).map_err(|_| Error::invalid(format!("row {i}"))))
                .is_ok();
            let init = if feasible {
                theta.clone()
            } else {
                diag.cold_restarts += 1;
                zero.clone()
            };
            let fit = fit_mle(&inst.family, &counts, lambda, &init, FIT_MAX_ITERS)?;
            diag.newton_iters += fit.newton_iters;
            if !fit.converged {
                diag.nonconverged_fits += 1;
            }
            if norm(&fit.theta_hat) > inst.s0 {
                diag.outside_ball += 1;
            }
            theta = fit.theta_hat;
            let state = ConfidenceState::new(inst, &counts, t - 1, horizon, delta, theta.clone())?;
            let exact_cover = exact_membership(inst, &state, &counts, &inst.theta_star)?;
            let relaxed_cover = relaxed_membership(inst, &state, &inst.theta_star);
            let (arm, index) = optimistic_choice(inst, &state)?;
            let u = dot(&inst.arms[arm], &inst.theta_star);
            let reward = inst.family.sample_tilted(u, rng)?;
            counts.record(arm, reward);
            let inst_regret = (best_mean - inst.family.mean_fn(u)?).max(T::zero());
            cum += inst_regret;
            Ok(RoundLog {
                t,
                arm,
                index,
                reward,
                inst_regret,
                cum_regret: cum,
                exact_cover,
                relaxed_cover,
            })
        })();
        match step {
            Ok(r) => {
                all_covered &= r.exact_cover;
                rounds.push(r);
            }
            Err(e) => {
                diag.aborted = Some(format!("round {t}: {e}"));
                all_covered = false;
                break;
            }
        }
    }
    Ok(RunOutput {
        rounds,
        diagnostics: diag,
        all_covered,
    })
}

/// [`run_ofu_glb`] on the ChaCha20 stream `(seed, replicate)`.
pub fn run_ofu_glb_seeded<T: Scalar>(
    inst: &GlbInstance<T>,
    horizon: usize,
    delta: T,
    seed: u64,
    replicate: u64,
) -> Result<RunOutput<T>> {
    run_ofu_glb(inst, horizon, delta, &mut stream(seed, replicate))
}
