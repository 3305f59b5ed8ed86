//! Below-mean mass witnesses `(a, b, eta)` with `Q([mu0 - b, mu0 - a]) >= eta`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::nef::{BaseDistribution, Law};
use crate::scalar::{lit, Scalar};

/// Slack allowed when re-measuring a witness mass.
pub const WITNESS_CHECK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupportWitness<T> {
    pub a: T,
    pub b: T,
    pub eta: T,
}

impl<T: Scalar> SupportWitness<T> {
    pub fn new(a: T, b: T, eta: T) -> Result<Self> {
        if !(a > T::zero() && b >= a && eta > T::zero() && eta <= T::one()) {
            return Err(Error::invalid(format!(
                "witness needs 0 < a <= b and eta in (0, 1], got a={a}, b={b}, eta={eta}"
            )));
        }
        Ok(SupportWitness { a, b, eta })
    }

    /// `a^2 eta`, the quantity every bound divides by.
    pub fn quality(&self) -> T {
        self.a * self.a * self.eta
    }

    /// Re-measure the mass on the base and compare with `eta`.
    pub fn holds_for(&self, base: &BaseDistribution<T>) -> Result<bool> {
        let mass = witness_mass(base, self.a, self.b)?;
        Ok(mass >= self.eta - lit(WITNESS_CHECK_TOL))
    }
}

/// `Q([mu0 - b, mu0 - a])` where `mu0` is the mean of `base`.
pub fn witness_mass<T: Scalar>(base: &BaseDistribution<T>, a: T, b: T) -> Result<T> {
    let mu = base.mean(T::zero())?;
    base.law(T::zero())?.prob_within(mu - b, mu - a)
}

/// Search a grid of below-mean quantiles for the witness maximizing `a^2 eta`.
pub fn find_support_witness<T: Scalar>(base: &BaseDistribution<T>) -> Result<SupportWitness<T>> {
    let (mu, var) = base.mean_var(T::zero())?;
    if base.is_degenerate() || var == T::zero() {
        return Err(Error::Degenerate(
            "base has zero variance; use the zero stretch function".into(),
        ));
    }
    let law = base.law(T::zero())?;
    let best = match &law {
        Law::Discrete(atoms) => discrete_search(atoms, mu),
        Law::Continuous(_) => continuous_search(&law, mu, var.sqrt())?,
    };
    best.ok_or_else(|| Error::Degenerate("no mass strictly below the mean".into()))
}

fn discrete_search<T: Scalar>(atoms: &[(T, T)], mu: T) -> Option<SupportWitness<T>> {
    // (distance below the mean, location, mass), nearest first
    let mut below: Vec<(T, T, T)> = atoms
        .iter()
        .filter(|a| a.0 < mu && a.1 > T::zero())
        .map(|&(y, p)| (mu - y, y, p))
        .collect();
    below.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite distances"));
    let half = lit::<T>(0.5);
    let mut best: Option<SupportWitness<T>> = None;
    for j in 0..below.len() {
        let alpha: T = below[j..].iter().map(|t| t.2).sum();
        let mut beyond = alpha;
        let mut k = j;
        loop {
            beyond -= below[k].2;
            if beyond <= half * alpha || k + 1 == below.len() {
                break;
            }
            k += 1;
        }
        // Keep the endpoints on the atoms despite rounding in `mu - y`.
        let mut a = below[j].0;
        while mu - a < below[j].1 {
            a = a - a * T::epsilon();
        }
        let mut b = below[k].0;
        while mu - b > below[k].1 {
            b = b + b * T::epsilon();
        }
        let eta: T = below
            .iter()
            .filter(|t| t.1 >= mu - b && t.1 <= mu - a)
            .map(|t| t.2)
            .sum();
        if let Ok(w) = SupportWitness::new(a, b.max(a), eta.min(T::one())) {
            if best.is_none_or(|cur| w.quality() > cur.quality()) {
                best = Some(w);
            }
        }
    }
    best
}

fn continuous_search<T: Scalar>(law: &Law<T>, mu: T, sd: T) -> Result<Option<SupportWitness<T>>> {
    // F(t) = P(X < mu - t), decreasing in t
    let below = |t: T| law.prob_below(mu - t, false);
    let m_below = below(T::zero())?;
    if !(m_below > T::zero()) {
        return Ok(None);
    }
    let solve = |target: T| -> Result<T> {
        let mut hi = sd;
        while below(hi)? > target {
            hi = hi + hi;
            if !hi.is_finite() {
                return Err(Error::Numeric {
                    msg: "quantile search did not bracket".into(),
                    residual: target.to_f64_lossy(),
                });
            }
        }
        let mut lo = T::zero();
        for _ in 0..80 {
            let mid = lit::<T>(0.5) * (lo + hi);
            if below(mid)? > target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= T::rel_tol() * hi {
                break;
            }
        }
        Ok(lit::<T>(0.5) * (lo + hi))
    };
    let mut best: Option<SupportWitness<T>> = None;
    for pct in 1..=45 {
        let q = lit::<T>(pct as f64 / 100.0);
        let a = solve((T::one() - q) * m_below)?;
        if !(a > T::zero()) {
            continue;
        }
        let alpha = below(a)?;
        let b = solve(lit::<T>(0.5) * alpha)?.max(a);
        let eta = law.prob_within(mu - b, mu - a)?;
        if let Ok(w) = SupportWitness::new(a, b, eta.min(T::one())) {
            if best.is_none_or(|cur| w.quality() > cur.quality()) {
                best = Some(w);
            }
        }
    }
    Ok(best)
}
