//! Discrete base whose stretch ratio grows linearly along `u = 2^{i+1}`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::nef::{BaseDistribution, Kind};
use crate::scalar::{lit, Scalar};

/// Claimed growth constant: `ratio >= 0.038 u` at `u = 2^{i+1}`, `i` even.
pub const LOWER_BOUND_SLOPE: f64 = 0.038;

/// Claimed window for the tilted mean, as multiples of `2^i`.
pub const MEAN_WINDOW: (f64, f64) = (1.24, 1.26);

#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleBase<T> {
    pub base: BaseDistribution<T>,
    pub i_max: u32,
    /// Constant multiplying the printed weights so that they sum to one.
    pub normalizer: T,
}

pub fn counterexample_distribution<T: Scalar>(i_max: u32) -> Result<CounterexampleBase<T>> {
    let base = BaseDistribution::new(Kind::Counterexample { i_max })?;
    let (_, log_z) = Kind::<T>::counterexample_tilt(i_max, T::zero());
    Ok(CounterexampleBase {
        base,
        i_max,
        normalizer: (-log_z).exp(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowerBoundReport<T> {
    pub i: u32,
    pub i_max: u32,
    pub u: T,
    pub mean: T,
    pub mean_lo: T,
    pub mean_hi: T,
    pub variance: T,
    pub third_central: T,
    pub ratio: T,
    pub ratio_threshold: T,
    pub mean_ok: bool,
    pub ratio_ok: bool,
    pub passes: bool,
}

/// Check the mean window and the ratio growth at `u = 2^{i+1}`, truncating at `i + 20`.
pub fn verify_lower_bound<T: Scalar>(i: u32) -> Result<LowerBoundReport<T>> {
    verify_lower_bound_with(i, i + 20)
}

/// As [`verify_lower_bound`] with an explicit truncation; `i_max >= i + 2` keeps both neighbours of `2^{i+1}`.
pub fn verify_lower_bound_with<T: Scalar>(i: u32, i_max: u32) -> Result<LowerBoundReport<T>> {
    if i < 4 || !i.is_multiple_of(2) {
        return Err(Error::invalid(format!("index must be even and at least 4, got {i}")));
    }
    if i_max < i + 2 {
        return Err(Error::invalid(format!("truncation {i_max} drops atoms next to 2^{}", i + 1)));
    }
    let cx = counterexample_distribution::<T>(i_max)?;
    let scale = lit::<T>(2.0).powi(i as i32);
    let u = scale + scale;
    let m = cx.base.moments(u)?;
    if !(m.mean.is_finite() && m.variance > T::zero() && m.third_central.is_finite()) {
        return Err(Error::Precision(format!(
            "tilted weights at u = {u} overflowed; the exponents must be combined in the log domain"
        )));
    }
    let ratio = m.third_central / m.variance;
    let mean_lo = lit::<T>(MEAN_WINDOW.0) * scale;
    let mean_hi = lit::<T>(MEAN_WINDOW.1) * scale;
    let ratio_threshold = lit::<T>(LOWER_BOUND_SLOPE) * u;
    let mean_ok = m.mean >= mean_lo && m.mean <= mean_hi;
    let ratio_ok = ratio >= ratio_threshold;
    Ok(LowerBoundReport {
        i,
        i_max,
        u,
        mean: m.mean,
        mean_lo,
        mean_hi,
        variance: m.variance,
        third_central: m.third_central,
        ratio,
        ratio_threshold,
        mean_ok,
        ratio_ok,
        passes: mean_ok && ratio_ok,
    })
}
