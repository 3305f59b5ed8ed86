//! The optimistic GLB algorithm: instance constants, confidence sets, the decision
//! rule, simulation and the closed-form regret bound.

mod bounds;
mod confidence;
mod run;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, norm};
use crate::nef::{linspace, BaseDistribution, NefFamily};
use crate::scalar::{lit, Scalar};
use crate::scc::{default_tail_rates, StretchCertificate};

pub use bounds::{elliptical_potential_check, self_bounding_check, theoretical_regret_bound, RegretBound};
pub use confidence::{
    confidence_radius, exact_membership, exact_set_norm, optimistic_choice, regularizer_schedule, relaxed_membership,
    relaxed_set_norm, ConfidenceState,
};
pub use run::{run_ofu_glb, run_ofu_glb_seeded, RoundLog, RunDiagnostics, RunOutput, FIT_MAX_ITERS};

/// Points used when scanning `[S2, S1]` for `sup mu'` and `sup Gamma`.
pub const SCAN_POINTS: usize = 401;

/// How the stretch supremum `K` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StretchSource {
    /// Maximum of the exact ratio `|mu''| / mu'` over a dense grid of `[S2, S1]`.
    #[default]
    Exact,
    /// Endpoint maximum of the closed-form certificate.
    Certified,
}

/// Everything needed to build a [`GlbInstance`]; unset fields are derived.
#[derive(Debug, Clone)]
pub struct InstanceSpec<T> {
    pub arms: Vec<Vec<T>>,
    pub theta_star: Vec<T>,
    pub base: BaseDistribution<T>,
    pub s0: Option<T>,
    pub s1: Option<T>,
    pub s2: Option<T>,
    pub tail_rates: Option<(T, T)>,
    pub stretch: StretchSource,
    pub m: Option<T>,
    pub lambda: Option<T>,
}

impl<T: Scalar> InstanceSpec<T> {
    pub fn new(arms: Vec<Vec<T>>, theta_star: Vec<T>, base: BaseDistribution<T>) -> Self {
        InstanceSpec {
            arms,
            theta_star,
            base,
            s0: None,
            s1: None,
            s2: None,
            tail_rates: None,
            stretch: StretchSource::Exact,
            m: None,
            lambda: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GlbInstance<T> {
    pub arms: Vec<Vec<T>>,
    pub theta_star: Vec<T>,
    pub family: NefFamily<T>,
    pub s0: T,
    pub s1: T,
    pub s2: T,
    pub c1: T,
    pub c2: T,
    pub l: T,
    pub k: T,
    pub m: T,
    pub stretch: StretchSource,
    /// Replaces the scheduled regularizer when set.
    pub lambda_override: Option<T>,
    pub best_arm: usize,
    pub kappa: T,
}

/// Arms evenly spaced on a circle of the given radius in the plane.
pub fn circle_arms<T: Scalar>(n: usize, radius: T) -> Vec<Vec<T>> {
    (0..n)
        .map(|i| {
            let a = T::TAU() * lit::<T>(i as f64) / lit::<T>(n as f64);
            vec![radius * a.cos(), radius * a.sin()]
        })
        .collect()
}

impl<T: Scalar> GlbInstance<T> {
    pub fn new(spec: InstanceSpec<T>) -> Result<Self> {
        let InstanceSpec { arms, theta_star, base, .. } = &spec;
        let d = theta_star.len();
        if arms.is_empty() || d == 0 {
            return Err(Error::Config("need at least one arm and a nonempty parameter".into()));
        }
        let tol = lit::<T>(1e-12);
        let mut max_norm = T::zero();
        for (i, x) in arms.iter().enumerate() {
            if x.len() != d {
                return Err(Error::Config(format!("arm {i} has dimension {}, parameter has {d}", x.len())));
            }
            let n = norm(x);
            if !(n <= T::one() + tol) {
                return Err(Error::Config(format!("arm {i} has norm {n} outside the unit ball")));
            }
            max_norm = max_norm.max(n);
        }
        let ts_norm = norm(theta_star);
        let s0 = spec.s0.unwrap_or(if ts_norm > T::zero() { ts_norm } else { T::one() });
        if !(s0 > T::zero()) || ts_norm > s0 * (T::one() + tol) {
            return Err(Error::Config(format!("|theta*| = {ts_norm} exceeds the parameter radius S0 = {s0}")));
        }
        let s1 = spec.s1.unwrap_or(s0 * max_norm);
        let s2 = spec.s2.unwrap_or(-s0 * max_norm);
        for (i, x) in arms.iter().enumerate() {
            let u = dot(x, theta_star);
            if !(u >= s2 - tol && u <= s1 + tol) {
                return Err(Error::Config(format!("arm {i} has x^T theta* = {u} outside [S2, S1] = [{s2}, {s1}]")));
            }
        }
        let family = NefFamily::new(base.clone(), s2, s1)
            .map_err(|e| Error::Config(format!("[S2, S1] = [{s2}, {s1}] must lie inside the natural parameter space: {e}")))?;

        let (c1, c2) = match spec.tail_rates {
            Some(r) => r,
            None => {
                let (lo, hi) = base.domain();
                let (d1, d2) = default_tail_rates(base);
                let two = lit::<T>(2.0);
                let c1 = if hi.is_finite() { d1 } else { d1.max(two * s1.abs()) };
                let c2 = if lo.is_finite() { d2 } else { d2.max(two * s2.abs()) };
                (c1, c2)
            }
        };
        if !(s1 < c1 && -c2 < s2) {
            return Err(Error::Config(format!(
                "tail rates (c1, c2) = ({c1}, {c2}) violate the assumption -c2 < S2 <= S1 < c1 with [S2, S1] = [{s2}, {s1}]"
            )));
        }

        let grid = linspace(s2, s1, SCAN_POINTS);
        let mut l = T::one();
        for &u in &grid {
            l = l.max(family.mean_var(u)?.1);
        }
        let k = if base.is_degenerate() {
            T::zero()
        } else {
            match spec.stretch {
                StretchSource::Exact => {
                    let mut k = T::zero();
                    for &u in &grid {
                        k = k.max(family.gamma_ratio(u)?);
                    }
                    k
                }
                StretchSource::Certified => StretchCertificate::build(base, Some((c1, c2)))?.supremum(&family)?,
            }
        };
        let ln2 = lit::<T>(2.0).ln();
        let reqs = [
            (k / ln2, "M < K/ln 2"),
            ((c1 - s1).recip(), "M < 1/(c1 - S1)"),
            ((c2 + s2).recip(), "M < 1/(c2 + S2)"),
        ];
        let needed = reqs.iter().fold(T::zero(), |a, r| a.max(r.0));
        let m = match spec.m {
            None => needed,
            Some(m) => {
                if let Some(bad) = reqs.iter().find(|r| m < r.0) {
                    return Err(Error::Config(format!(
                        "M = {m} is too small: {} = {} violates the confidence-set condition",
                        bad.1, bad.0
                    )));
                }
                m
            }
        };
        if let Some(lam) = spec.lambda {
            if !(lam > T::zero()) {
                return Err(Error::Config(format!("lambda override must be positive, got {lam}")));
            }
        }

        let mut best_arm = 0;
        let mut best = T::neg_infinity();
        for (i, x) in arms.iter().enumerate() {
            let mu = family.mean_fn(dot(x, theta_star))?;
            if mu > best {
                best = mu;
                best_arm = i;
            }
        }
        let (_, v_star) = family.mean_var(dot(&arms[best_arm], theta_star))?;
        Ok(GlbInstance {
            arms: spec.arms,
            theta_star: spec.theta_star,
            family,
            s0,
            s1,
            s2,
            c1,
            c2,
            l,
            k,
            m: m.max(T::min_positive_value()),
            stretch: spec.stretch,
            lambda_override: spec.lambda,
            best_arm,
            kappa: v_star.recip(),
        })
    }

    pub fn dim(&self) -> usize {
        self.theta_star.len()
    }

    /// `c = 1 + 2K(S1 - S2)`
    pub fn c_factor(&self) -> T {
        T::one() + lit::<T>(2.0) * self.k * (self.s1 - self.s2)
    }

    /// Mean reward of arm `i`.
    pub fn arm_mean(&self, i: usize) -> Result<T> {
        self.family.mean_fn(dot(&self.arms[i], &self.theta_star))
    }

    /// Regularizer in force for horizon `horizon`.
    pub fn lambda(&self, horizon: usize, delta: T) -> T {
        self.lambda_override.unwrap_or_else(|| regularizer_schedule(self, horizon, delta))
    }
}
