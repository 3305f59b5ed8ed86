use serde::Serialize;

use super::GlbInstance;
use crate::check::Check;
use crate::error::{Error, Result};
use crate::linalg::{dot, norm, Matrix};
use crate::nef::NefFamily;
use crate::scalar::{lit, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegretBound<T> {
    pub term1: T,
    pub term2: T,
    pub term3: T,
    pub total: T,
    pub lambda: T,
    pub gamma: T,
    pub c: T,
    pub kappa: T,
    pub delta: T,
}

/// The three-term high-probability regret bound at horizon `horizon`.
pub fn theoretical_regret_bound<T: Scalar>(inst: &GlbInstance<T>, horizon: usize, delta: T) -> RegretBound<T> {
    let lam = inst.lambda(horizon, delta);
    let gamma = super::confidence::radius_with_lambda(inst, horizon, lam, delta);
    let c = inst.c_factor();
    let d = lit::<T>(inst.dim() as f64);
    let tt = lit::<T>(horizon as f64);
    let l = inst.l;
    let k = inst.k;
    let kappa = inst.kappa;
    let info = (T::one() + l / lam) * (T::one() + l * tt / (d * lam)).ln();
    let cg2 = c * c * gamma * gamma;
    let term1 = lit::<T>(8.0) * c * gamma * (d * kappa.recip() * info * tt).sqrt();
    // K = 0 kills the second term even for a degenerate optimal arm.
    let term2 = if k == T::zero() {
        T::zero()
    } else {
        lit::<T>(8.0) * cg2 * l * l * k * kappa * (lam + tt / d).ln()
    };
    let term3 = lit::<T>(32.0) * cg2 * k * d * info;
    RegretBound {
        term1,
        term2,
        term3,
        total: term1 + term2 + term3,
        lambda: lam,
        gamma,
        c,
        kappa,
        delta,
    }
}

/// `sum_t |a_t|^2_{V_{t-1}^{-1}} <= 2d max(1, A^2/lambda) log(1 + n A^2 / (d lambda))`
pub fn elliptical_potential_check<T: Scalar>(vectors: &[Vec<T>], lambda: T, bound_a: T) -> Result<Check<T>> {
    if !(lambda > T::zero()) {
        return Err(Error::invalid(format!("lambda must be positive, got {lambda}")));
    }
    let d = vectors.first().map_or(1, |v| v.len());
    let mut vinv = Matrix::scaled_identity(d, lambda.recip());
    let mut lhs = T::zero();
    for (t, a) in vectors.iter().enumerate() {
        if a.len() != d {
            return Err(Error::invalid(format!("vector {t} has dimension {}, expected {d}", a.len())));
        }
        let n = norm(a);
        if n > bound_a * (T::one() + lit(1e-12)) {
            return Err(Error::invalid(format!("vector {t} has norm {n} > A = {bound_a}")));
        }
        let w = vinv.mul_vec(a);
        let q = dot(a, &w);
        lhs += q;
        // Sherman-Morrison update of V^{-1}
        vinv.add_outer(-(T::one() + q).recip(), &w);
    }
    let df = lit::<T>(d as f64);
    let a2 = bound_a * bound_a;
    let n = lit::<T>(vectors.len() as f64);
    let rhs = lit::<T>(2.0) * df * (a2 / lambda).max(T::one()) * (n * a2 / (df * lambda)).ln_1p();
    Ok(Check::le(lhs, rhs, T::zero()))
}

/// `sum_t mu'(a_t) <= n mu'(b) + K sum_t (mu(b) - mu(a_t))` for points `a_t <= b` in `[S2, S1]`.
pub fn self_bounding_check<T: Scalar>(family: &NefFamily<T>, points: &[T], b: T, k: T) -> Result<Check<T>> {
    let (lo, hi) = (family.param_lo, family.param_hi);
    let inside = |u: T| u >= lo && u <= hi;
    if !inside(b) {
        return Err(Error::domain("endpoint b", b.to_f64_lossy(), lo.to_f64_lossy(), hi.to_f64_lossy()));
    }
    let (mu_b, var_b) = family.mean_var(b)?;
    let mut lhs = T::zero();
    let mut gap = T::zero();
    for &a in points {
        if !inside(a) || a > b {
            return Err(Error::domain("point a_t", a.to_f64_lossy(), lo.to_f64_lossy(), b.to_f64_lossy()));
        }
        let (mu, var) = family.mean_var(a)?;
        lhs += var;
        gap += mu_b - mu;
    }
    let rhs = lit::<T>(points.len() as f64) * var_b + k * gap;
    Ok(Check::le(lhs, rhs, lit(1e-9)))
}
