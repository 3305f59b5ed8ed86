//! Self-concordance certificates for natural exponential families.
//!
//! The subexponential certificate bounds the stretch ratio `|mu''| / mu'` by a
//! closed form in the tail constants of the centered base and a below-mean mass
//! witness. The subgaussian envelope is linear in `|u|`, and the discrete
//! counterexample shows that linear growth cannot be improved in general.

mod counterexample;
mod subgaussian;
mod witness;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::nef::{BaseDistribution, NefFamily};
use crate::scalar::{lit, Scalar};

pub use counterexample::{
    counterexample_distribution, verify_lower_bound, verify_lower_bound_with, CounterexampleBase, LowerBoundReport,
    LOWER_BOUND_SLOPE,
};
pub use subgaussian::{subgaussian_stretch_bound, SubgaussianEnvelope};
pub use witness::{find_support_witness, witness_mass, SupportWitness, WITNESS_CHECK_TOL};

/// `P(Y > t) <= scale1 * e^{-c1 t}` and `P(Y < -t) <= scale2 * e^{-c2 t}` for the centered base.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailConstants<T> {
    pub c1: T,
    pub scale1: T,
    pub c2: T,
    pub scale2: T,
}

impl<T: Scalar> TailConstants<T> {
    pub fn new(c1: T, scale1: T, c2: T, scale2: T) -> Result<Self> {
        for (n, v) in [("c1", c1), ("C1", scale1), ("c2", c2), ("C2", scale2)] {
            if !(v > T::zero() && v.is_finite()) {
                return Err(Error::invalid(format!("tail constant {n} must be positive and finite, got {v}")));
            }
        }
        Ok(TailConstants { c1, scale1, c2, scale2 })
    }

    /// The same constants seen from the reflected base.
    pub fn reflected(&self) -> Self {
        TailConstants {
            c1: self.c2,
            scale1: self.scale2,
            c2: self.c1,
            scale2: self.scale1,
        }
    }
}

/// Default rates: 90% of the way to a finite domain boundary, 1 on an infinite side.
pub fn default_tail_rates<T: Scalar>(base: &BaseDistribution<T>) -> (T, T) {
    let (lo, hi) = base.domain();
    let f = lit::<T>(0.9);
    let c1 = if hi.is_finite() { f * hi } else { T::one() };
    let c2 = if lo.is_finite() { -f * lo } else { T::one() };
    (c1, c2)
}

/// Chernoff constants `C1 = M_{Q0}(c1)`, `C2 = M_{Q0}(-c2)` of the centered base `Q0`.
pub fn fit_tail_constants<T: Scalar>(base: &BaseDistribution<T>, rates: (T, T)) -> Result<TailConstants<T>> {
    let (c1, c2) = rates;
    if !(c1 > T::zero() && c2 > T::zero()) {
        return Err(Error::invalid(format!("tail rates must be positive, got ({c1}, {c2})")));
    }
    let centered = base.centered()?;
    centered.check(c1)?;
    centered.check(-c2)?;
    TailConstants::new(c1, centered.mgf(c1)?, c2, centered.mgf(-c2)?)
}

/// The polynomial term of the stretch bound.
pub fn g_q_value<T: Scalar>(m1: T, m2: T, r1: T, r2: T, w: &SupportWitness<T>) -> Result<T> {
    for (n, v) in [("M1", m1), ("M2", m2), ("m1", r1), ("m2", r2), ("a", w.a), ("b", w.b), ("eta", w.eta)] {
        if !(v > T::zero()) {
            return Err(Error::invalid(format!("{n} must be positive, got {v}")));
        }
    }
    let e3 = T::E().powi(3);
    let b = w.b;
    let inner = lit::<T>(204.0) / (e3 * r1.powi(3) * m1.powi(3))
        + lit::<T>(6.0) * b * b / (e3 * r1 * m1.powi(3))
        + (lit::<T>(81.0) * m2 + lit::<T>(9.0) * m2 * r1 * r1 * b * b) / r2.powi(3);
    Ok(lit::<T>(1.5) * b + inner / (w.a * w.a * w.eta))
}

/// Closed-form stretch function valid on `(-c2, c1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StretchCertificate<T> {
    pub tail: TailConstants<T>,
    /// Witness below the mean; drives the `u >= 0` branch.
    pub witness: SupportWitness<T>,
    /// Witness of the reflected base (mass above the mean); drives the `u < 0` branch.
    pub witness_reflected: SupportWitness<T>,
    pub g_q_right: T,
    pub g_q_left: T,
    pub c0_right: T,
    pub c0_left: T,
}

impl<T: Scalar> StretchCertificate<T> {
    pub fn from_parts(tail: TailConstants<T>, witness: SupportWitness<T>, witness_reflected: SupportWitness<T>) -> Result<Self> {
        let t = tail;
        Ok(StretchCertificate {
            tail,
            witness,
            witness_reflected,
            g_q_right: g_q_value(t.scale1, t.scale2, t.c1, t.c2, &witness)?,
            g_q_left: g_q_value(t.scale2, t.scale1, t.c2, t.c1, &witness_reflected)?,
            c0_right: t.scale1 * t.c1 * T::E(),
            c0_left: t.scale2 * t.c2 * T::E(),
        })
    }

    /// Certificate for `base` at the given tail rates, or the defaults.
    pub fn build(base: &BaseDistribution<T>, rates: Option<(T, T)>) -> Result<Self> {
        let rates = rates.unwrap_or_else(|| default_tail_rates(base));
        let tail = fit_tail_constants(base, rates)?;
        let centered = base.centered()?;
        let w = find_support_witness(&centered)?;
        let wr = find_support_witness(&centered.reflected())?;
        Self::from_parts(tail, w, wr)
    }

    /// Certificate of the reflected base.
    pub fn reflected(&self) -> Result<Self> {
        Self::from_parts(self.tail.reflected(), self.witness_reflected, self.witness)
    }

    /// True when the stored polynomial values are reproduced from the constants.
    pub fn is_consistent(&self) -> bool {
        Self::from_parts(self.tail, self.witness, self.witness_reflected).is_ok_and(|c| c == *self)
    }

    pub fn bound(&self, u: T) -> Result<T> {
        let t = &self.tail;
        if !(u > -t.c2 && u < t.c1) {
            return Err(Error::domain("stretch bound argument", u.to_f64_lossy(), -t.c2.to_f64_lossy(), t.c1.to_f64_lossy()));
        }
        let two_e = lit::<T>(2.0) * T::E();
        let h = lit::<T>(1.5);
        Ok(if u >= T::zero() {
            let g = t.c1 - u;
            h * (two_e * t.scale1 * t.c1 / (g * g) + u * self.witness.b / g) + self.g_q_right
        } else {
            let g = t.c2 + u;
            h * (two_e * t.c2 * t.scale2 / (g * g) - u * self.witness_reflected.b / g) + self.g_q_left
        })
    }

    /// `sup` of the bound over `[S2, S1]`, attained at an endpoint.
    pub fn supremum(&self, family: &NefFamily<T>) -> Result<T> {
        Ok(self.bound(family.param_lo)?.max(self.bound(family.param_hi)?))
    }
}

pub fn stretch_bound<T: Scalar>(cert: &StretchCertificate<T>, u: T) -> Result<T> {
    cert.bound(u)
}

pub fn stretch_supremum<T: Scalar>(cert: &StretchCertificate<T>, family: &NefFamily<T>) -> Result<T> {
    cert.supremum(family)
}

/// One grid point of a dominance check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DominancePoint<T> {
    pub u: T,
    pub ratio: T,
    pub bound: T,
    pub ok: bool,
}

/// Compare `bound(u)` with the exact ratio at every grid point; `inflate` scales the bound.
pub fn dominance_grid<T: Scalar>(
    base: &BaseDistribution<T>,
    cert: &StretchCertificate<T>,
    grid: &[T],
    inflate: T,
) -> Result<Vec<DominancePoint<T>>> {
    use rayon::prelude::*;
    grid.par_iter()
        .map(|&u| {
            let ratio = base.gamma_ratio(u)?;
            let bound = cert.bound(u)? * inflate;
            Ok(DominancePoint { u, ratio, bound, ok: bound >= ratio })
        })
        .collect()
}
