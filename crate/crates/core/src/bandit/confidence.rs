use serde::Serialize;

use super::GlbInstance;
use crate::error::{Error, Result};
use crate::glm::{gradient_map, hessian, Design};
use crate::linalg::{dot, norm, sub, Matrix};
use crate::scalar::{lit, Scalar};

/// `log(max(e sqrt(1 + n L / d), 1/delta))`
fn log_term<T: Scalar>(inst: &GlbInstance<T>, n: usize, delta: T) -> T {
    let d = lit::<T>(inst.dim() as f64);
    let a = T::E() * (T::one() + lit::<T>(n as f64) * inst.l / d).sqrt();
    a.max(delta.recip()).ln()
}

/// `lambda_T = 1 v (2dM/S0) log(e sqrt(1 + TL/d) v 1/delta)`
pub fn regularizer_schedule<T: Scalar>(inst: &GlbInstance<T>, horizon: usize, delta: T) -> T {
    let d = lit::<T>(inst.dim() as f64);
    let v = lit::<T>(2.0) * d * inst.m / inst.s0 * log_term(inst, horizon, delta);
    v.max(T::one())
}

/// `gamma_t = sqrt(lambda)(1/(2M) + S0) + (4Md / sqrt(lambda)) log(e sqrt(1 + tL/d) v 1/delta)`
pub fn confidence_radius<T: Scalar>(inst: &GlbInstance<T>, t: usize, horizon: usize, delta: T) -> T {
    radius_with_lambda(inst, t, inst.lambda(horizon, delta), delta)
}

pub(crate) fn radius_with_lambda<T: Scalar>(inst: &GlbInstance<T>, t: usize, lambda: T, delta: T) -> T {
    let d = lit::<T>(inst.dim() as f64);
    let sl = lambda.sqrt();
    sl * ((lit::<T>(2.0) * inst.m).recip() + inst.s0) + lit::<T>(4.0) * inst.m * d / sl * log_term(inst, t, delta)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfidenceState<T> {
    pub t: usize,
    pub theta_hat: Vec<T>,
    #[serde(skip)]
    pub hessian_at_hat: Matrix<T>,
    pub lambda_t: T,
    pub gamma_t: T,
    pub delta: T,
}

impl<T: Scalar> ConfidenceState<T> {
    pub fn new(
        inst: &GlbInstance<T>,
        data: &impl Design<T>,
        t: usize,
        horizon: usize,
        delta: T,
        theta_hat: Vec<T>,
    ) -> Result<Self> {
        if !(delta > T::zero() && delta <= T::one()) {
            return Err(Error::invalid(format!("delta must lie in (0, 1], got {delta}")));
        }
        let lambda_t = inst.lambda(horizon, delta);
        let hessian_at_hat = hessian(&inst.family, data, lambda_t, &theta_hat)?;
        Ok(ConfidenceState {
            t,
            gamma_t: radius_with_lambda(inst, t, lambda_t, delta),
            theta_hat,
            hessian_at_hat,
            lambda_t,
            delta,
        })
    }
}

/// `|g(theta) - g(theta_hat)|` in the `H(theta)^{-1}` norm.
pub fn exact_set_norm<T: Scalar>(inst: &GlbInstance<T>, state: &ConfidenceState<T>, data: &impl Design<T>, theta: &[T]) -> Result<T> {
    let r = norm(theta);
    if r > inst.s0 * (T::one() + lit(1e-12)) {
        return Err(Error::domain("|theta|", r.to_f64_lossy(), 0.0, inst.s0.to_f64_lossy()));
    }
    let f = &inst.family;
    let lam = state.lambda_t;
    let diff = sub(&gradient_map(f, data, lam, theta)?, &gradient_map(f, data, lam, &state.theta_hat)?);
    Ok(hessian(f, data, lam, theta)?.cholesky()?.inv_quad_form(&diff).sqrt())
}

pub fn exact_membership<T: Scalar>(inst: &GlbInstance<T>, state: &ConfidenceState<T>, data: &impl Design<T>, theta: &[T]) -> Result<bool> {
    Ok(exact_set_norm(inst, state, data, theta)? <= state.gamma_t)
}

/// `|theta - theta_hat|` in the `H(theta_hat)` norm.
pub fn relaxed_set_norm<T: Scalar>(state: &ConfidenceState<T>, theta: &[T]) -> T {
    state.hessian_at_hat.quad_form(&sub(theta, &state.theta_hat)).max(T::zero()).sqrt()
}

/// Membership in the ellipsoid of radius `c gamma_t` around `theta_hat`.
pub fn relaxed_membership<T: Scalar>(inst: &GlbInstance<T>, state: &ConfidenceState<T>, theta: &[T]) -> bool {
    relaxed_set_norm(state, theta) <= inst.c_factor() * state.gamma_t
}

/// Arm maximizing `x^T theta_hat + c gamma_t |x|_{H^{-1}}`; ties go to the lowest index.
pub fn optimistic_choice<T: Scalar>(inst: &GlbInstance<T>, state: &ConfidenceState<T>) -> Result<(usize, T)> {
    let chol = state.hessian_at_hat.cholesky()?;
    let width = inst.c_factor() * state.gamma_t;
    let mut best = (0, T::neg_infinity());
    for (i, x) in inst.arms.iter().enumerate() {
        let idx = dot(x, &state.theta_hat) + width * chol.inv_quad_form(x).sqrt();
        if idx > best.1 {
            best = (i, idx);
        }
    }
    Ok(best)
}
