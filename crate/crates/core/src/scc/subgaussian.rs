//! Linear envelope `A |u| + B` on the stretch ratio of a subgaussian base.

use serde::Serialize;

use super::witness::SupportWitness;
use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

/// Constants of the envelope for a centered base with `P(|Y| >= t) <= C e^{-c t^2 / 2}`.
///
/// A proxy `sigma` maps to `c = 1 / sigma^2` and `C = 2`. The left-tail scale
/// inside the proof is taken to be `C` as well, and the variance lower bound is
/// the subexponential one built from the witness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubgaussianEnvelope<T> {
    pub c: T,
    pub scale: T,
    pub frak1: T,
    pub frak3: T,
    pub frak4: T,
    /// `u`-coefficient of the centering radius, `2 (4/c + 1)`.
    pub alpha: T,
    /// Constant part of the centering radius, `8/c + b + frak3`.
    pub beta: T,
    pub slope: T,
    pub intercept: T,
}

impl<T: Scalar> SubgaussianEnvelope<T> {
    pub fn new(sigma_proxy: T, w: &SupportWitness<T>) -> Result<Self> {
        if !(sigma_proxy > T::zero() && sigma_proxy.is_finite()) {
            return Err(Error::invalid(format!("sigma proxy must be positive, got {sigma_proxy}")));
        }
        let two = lit::<T>(2.0);
        let four = lit::<T>(4.0);
        let c = (sigma_proxy * sigma_proxy).recip();
        let scale = two;
        let pi_c = (T::PI() / c).sqrt();
        let frak1 = scale * (T::one() + pi_c);
        let frak3 = pi_c * frak1;
        let frak4 = scale * (T::PI() / (two * c)).sqrt();
        let alpha = two * (four / c + T::one());
        let beta = lit::<T>(8.0) / c + w.b + frak3;
        let k = lit::<T>(6.0) * (frak3 + frak4) / w.quality();
        let h = lit::<T>(1.5);
        let slope = h * alpha + k * (alpha * alpha / (four / c).sqrt() + two * alpha * beta);
        let intercept = h * beta + k * (two / c + beta * beta);
        Ok(SubgaussianEnvelope {
            c,
            scale,
            frak1,
            frak3,
            frak4,
            alpha,
            beta,
            slope,
            intercept,
        })
    }

    pub fn value(&self, u: T) -> T {
        self.slope * u.abs() + self.intercept
    }
}

pub fn subgaussian_stretch_bound<T: Scalar>(sigma_proxy: T, w: &SupportWitness<T>, u: T) -> Result<T> {
    if !u.is_finite() {
        return Err(Error::invalid(format!("u must be finite, got {u}")));
    }
    Ok(SubgaussianEnvelope::new(sigma_proxy, w)?.value(u))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn envelope_is_linear_and_even() {
        let w = SupportWitness::new(0.5_f64, 0.5, 0.5).unwrap();
        let e = SubgaussianEnvelope::new(1.0, &w).unwrap();
        assert_eq!(e.value(3.0), e.value(-3.0));
        let d1 = e.value(2.0) - e.value(1.0);
        let d2 = e.value(5.0) - e.value(4.0);
        assert!((d1 - d2).abs() < 1e-9 * d1);
        assert!(e.intercept > 0.0 && e.slope > 0.0);
    }

    #[test]
    fn rejects_bad_proxy() {
        let w = SupportWitness::new(0.5_f64, 0.5, 0.5).unwrap();
        assert!(subgaussian_stretch_bound(0.0, &w, 1.0).is_err());
        assert!(subgaussian_stretch_bound(-1.0, &w, 1.0).is_err());
    }

    #[test]
    fn constants_for_unit_proxy() {
        let w = SupportWitness::new(1.0_f64, 1.0, 1.0).unwrap();
        let e = SubgaussianEnvelope::new(1.0, &w).unwrap();
        let pi = std::f64::consts::PI;
        assert!((e.frak1 - 2.0 * (1.0 + pi.sqrt())).abs() < 1e-14);
        assert!((e.frak4 - 2.0 * (pi / 2.0).sqrt()).abs() < 1e-14);
        assert_eq!(e.alpha, 10.0);
    }
}
