//! Tail and MGF certificates: the subexponential equivalence, tilted tail bounds,
//! the variance lower bound and the quadratic CGF bound.
//!
//! Lemma-level functions take any base and work on its centered version, since
//! every bound here is stated for a mean-zero base.

use serde::Serialize;

use crate::check::{Check, SLACK};
use crate::error::{Error, Result};
use crate::nef::{BaseDistribution, NefFamily};
use crate::scalar::{lit, Scalar};
use crate::scc::{SupportWitness, TailConstants};

/// `1 + C1 lambda^2 / (c1 (c1 - lambda))`, an upper bound on `M_Q(lambda)` for `Q` in the right tail class.
pub fn mgf_from_tail_bound<T: Scalar>(c1: T, scale1: T, lambda: T) -> Result<T> {
    if !(lambda >= T::zero() && lambda < c1) {
        return Err(Error::domain("lambda", lambda.to_f64_lossy(), 0.0, c1.to_f64_lossy()));
    }
    Ok(T::one() + scale1 * lambda * lambda / (c1 * (c1 - lambda)))
}

/// Chernoff bound `M(c) e^{-c t}` on `P(Y >= t)`.
pub fn tail_from_mgf<T: Scalar>(m_at_c: T, c: T, t: T) -> Result<T> {
    if !(c > T::zero()) || !(t >= T::zero()) || !m_at_c.is_finite() {
        return Err(Error::invalid(format!("need c > 0, t >= 0 and finite M(c); got c={c}, t={t}, M={m_at_c}")));
    }
    Ok(m_at_c * (-c * t).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
    Both,
}

/// Grid-checked membership of the centered base in an exponential tail class.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailCertificate<T> {
    pub side: Side,
    pub rate: T,
    pub scale: T,
    pub checked_on: Vec<T>,
    /// Largest `bound - measured` over the grid.
    pub max_slack: T,
    /// Smallest `bound - measured`; negative beyond `-1e-10` means a violation.
    pub min_slack: T,
    pub ok: bool,
}

/// Check `P(Y - EY > t) <= scale e^{-rate t}` (and/or the left tail) on a grid of `t >= 0`.
pub fn certify_tail<T: Scalar>(base: &BaseDistribution<T>, side: Side, rate: T, scale: T, ts: &[T]) -> Result<TailCertificate<T>> {
    let law = base.centered()?.law(T::zero())?;
    let mut max_slack = T::neg_infinity();
    let mut min_slack = T::infinity();
    for &t in ts {
        let bound = scale * (-rate * t).exp();
        let mut measured = Vec::with_capacity(2);
        if side != Side::Left {
            measured.push(law.prob_above(t, false)?);
        }
        if side != Side::Right {
            measured.push(law.prob_below(-t, false)?);
        }
        for m in measured {
            max_slack = max_slack.max(bound - m);
            min_slack = min_slack.min(bound - m);
        }
    }
    Ok(TailCertificate {
        side,
        rate,
        scale,
        checked_on: ts.to_vec(),
        max_slack,
        min_slack,
        ok: min_slack >= -lit::<T>(SLACK),
    })
}

/// `psi_{Q_u}(s) <= s mu(u) + s^2 mu'(u)` for admissible `s`.
pub fn tilted_cgf_quadratic_bound<T: Scalar>(family: &NefFamily<T>, stretch_sup: T, u: T, s: T) -> Result<Check<T>> {
    let (s2, s1) = (family.param_lo, family.param_hi);
    if !(u >= s2 && u <= s1) {
        return Err(Error::domain("tilt u", u.to_f64_lossy(), s2.to_f64_lossy(), s1.to_f64_lossy()));
    }
    let radius = if stretch_sup > T::zero() {
        lit::<T>(2.0).ln() / stretch_sup
    } else {
        T::infinity()
    };
    let (lo, hi) = family.base.domain();
    let (s_lo, s_hi) = (lo - s2, hi - s1);
    if !(s_lo < s_hi) || !(-radius < s_hi && radius > s_lo) {
        return Err(Error::InvalidArgument(format!(
            "admissible set for s is empty: [-{radius}, {radius}] misses ({s_lo}, {s_hi})"
        )));
    }
    if !(s.abs() <= radius && s > s_lo && s < s_hi) {
        return Err(Error::InvalidArgument(format!(
            "s = {s} must satisfy |s| <= ln 2 / K = {radius} and lie in ({s_lo}, {s_hi})"
        )));
    }
    let lhs = family.cgf(u + s)? - family.cgf(u)?;
    let (m, v) = family.mean_var(u)?;
    Ok(Check::le_default(lhs, s * m + s * s * v))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TiltedTailBounds<T> {
    pub upper_bound_right: T,
    pub upper_bound_left: T,
    pub mean_bound: T,
}

/// Right-hand sides of the tilted tail lemmas for the centered base at `u in [0, c1)`, `t >= 0`.
pub fn tilted_tail_bounds<T: Scalar>(base: &BaseDistribution<T>, tail: &TailConstants<T>, u: T, t: T) -> Result<TiltedTailBounds<T>> {
    if !(u >= T::zero() && u < tail.c1) {
        return Err(Error::domain("tilt u", u.to_f64_lossy(), 0.0, tail.c1.to_f64_lossy()));
    }
    if !(t >= T::zero()) {
        return Err(Error::invalid(format!("t must be nonnegative, got {t}")));
    }
    let centered = base.centered()?;
    let m = centered.mgf(u)?;
    let g = tail.c1 - u;
    let e = T::E();
    Ok(TiltedTailBounds {
        upper_bound_right: tail.scale1 * e / m * (-g * t).exp() * (T::one() + u / g),
        upper_bound_left: tail.scale2 * (-(u + tail.c2) * t).exp() / m,
        mean_bound: tail.scale1 * tail.c1 * e / (g * g),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TiltedTailCheck<T> {
    pub bounds: TiltedTailBounds<T>,
    pub right: Check<T>,
    pub left: Check<T>,
    pub mean: Check<T>,
    pub mean_nonnegative: bool,
    pub ok: bool,
}

/// Measure `Q_u((t, inf))`, `Q_u((-inf, -t))` and `mu(u)` of the centered base against the bounds.
pub fn verify_tilted_tails<T: Scalar>(base: &BaseDistribution<T>, tail: &TailConstants<T>, u: T, t: T) -> Result<TiltedTailCheck<T>> {
    let bounds = tilted_tail_bounds(base, tail, u, t)?;
    let centered = base.centered()?;
    let law = centered.law(u)?;
    let mu = centered.mean(u)?;
    let right = Check::le_default(law.prob_above(t, false)?, bounds.upper_bound_right);
    let left = Check::le_default(law.prob_below(-t, false)?, bounds.upper_bound_left);
    let mean = Check::le_default(mu, bounds.mean_bound);
    let mean_nonnegative = mu >= -lit::<T>(SLACK);
    Ok(TiltedTailCheck {
        bounds,
        right,
        left,
        mean,
        mean_nonnegative,
        ok: right.ok && left.ok && mean.ok && mean_nonnegative,
    })
}

/// `a^2 eta e^{-u b} / M_Q(u)` for the centered base and `u >= 0`.
pub fn variance_lower_bound<T: Scalar>(base: &BaseDistribution<T>, w: &SupportWitness<T>, u: T) -> Result<T> {
    if base.is_degenerate() {
        return Err(Error::Degenerate("variance lower bound needs a nondegenerate base".into()));
    }
    if !(u >= T::zero()) {
        return Err(Error::invalid(format!("u must be nonnegative, got {u}")));
    }
    let centered = base.centered()?;
    centered.check(u)?;
    Ok(w.quality() * (-u * w.b).exp() / centered.mgf(u)?)
}

/// `variance_lower_bound <= mu'(u)`, as a check.
pub fn verify_variance_lower_bound<T: Scalar>(base: &BaseDistribution<T>, w: &SupportWitness<T>, u: T) -> Result<Check<T>> {
    let lb = variance_lower_bound(base, w, u)?;
    let var = base.moments(u)?.variance;
    Ok(Check::le_default(lb, var))
}

/// Relative gap between `M_{Q_u}(eps)` and `M_Q(u + eps) / M_Q(u)`.
pub fn tilt_identity_residual<T: Scalar>(base: &BaseDistribution<T>, u: T, eps: T) -> Result<T> {
    let direct = base.tilted(u)?.mgf(eps)?;
    let ratio = base.mgf(u + eps)? / base.mgf(u)?;
    Ok((direct - ratio).abs() / ratio.abs().max(T::min_positive_value()))
}

/// Chernoff certificates for both tails of the centered `Q_u`, with rate `eps` inside its domain.
pub fn certify_tilted_tails<T: Scalar>(base: &BaseDistribution<T>, u: T, eps: T, ts: &[T]) -> Result<Check<T>> {
    let q = base.tilted(u)?.centered()?;
    let law = q.law(T::zero())?;
    let (m_up, m_down) = (q.mgf(eps)?, q.mgf(-eps)?);
    let mut worst = Check::le_default(T::zero(), T::zero());
    let mut worst_slack = T::infinity();
    for &t in ts {
        for (measured, m) in [(law.prob_above(t, true)?, m_up), (law.prob_below(-t, true)?, m_down)] {
            let c = Check::le_default(measured, tail_from_mgf(m, eps, t)?);
            if c.slack() < worst_slack {
                worst_slack = c.slack();
                worst = c;
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scc::{find_support_witness, fit_tail_constants};

    #[test]
    fn mgf_bound_arithmetic() {
        assert_eq!(mgf_from_tail_bound(1.0_f64, 1.0, 0.0).unwrap(), 1.0);
        assert!((mgf_from_tail_bound(1.0_f64, 1.0, 0.5).unwrap() - 1.5).abs() < 1e-15);
        assert!(mgf_from_tail_bound(1.0_f64, 1.0, 1.0).is_err());
    }

    #[test]
    fn centered_exponential_tail() {
        let b = BaseDistribution::exponential(1.0_f64).unwrap();
        let c = b.centered().unwrap();
        let bound = tail_from_mgf(c.mgf(0.5).unwrap(), 0.5, 3.0).unwrap();
        assert!((bound - 2.0 * (-0.5f64).exp() * (-1.5f64).exp()).abs() < 1e-14);
        let exact = c.law(0.0).unwrap().prob_above(3.0, true).unwrap();
        assert!((exact - (-4.0f64).exp()).abs() < 1e-14);
        assert!(exact <= bound);
    }

    #[test]
    fn tilted_tails_hold_for_exponential() {
        let b = BaseDistribution::exponential(1.0_f64).unwrap();
        let tail = fit_tail_constants(&b, (0.9, 1.0)).unwrap();
        for u in [0.0, 0.3, 0.6, 0.85] {
            for t in [0.0, 0.5, 2.0, 6.0] {
                assert!(verify_tilted_tails(&b, &tail, u, t).unwrap().ok, "u={u} t={t}");
            }
        }
        assert!(tilted_tail_bounds(&b, &tail, 0.9, 1.0).is_err());
    }

    #[test]
    fn variance_lower_bound_exponential() {
        let b = BaseDistribution::exponential(1.0_f64).unwrap();
        let w = find_support_witness(&b.centered().unwrap()).unwrap();
        let c = verify_variance_lower_bound(&b, &w, 0.3).unwrap();
        assert!(c.ok);
        assert!((c.rhs - 1.0 / 0.49).abs() < 1e-12);
    }

    #[test]
    fn quadratic_cgf_bound_rejects_large_steps() {
        let f = NefFamily::new(BaseDistribution::exponential(1.0_f64).unwrap(), -0.5, 0.5).unwrap();
        assert!(tilted_cgf_quadratic_bound(&f, 4.0, 0.25, 0.0).unwrap().ok);
        assert!(tilted_cgf_quadratic_bound(&f, 4.0, 0.25, 0.2).is_err());
        assert!(tilted_cgf_quadratic_bound(&f, 4.0, 0.9, 0.0).is_err());
    }

    #[test]
    fn tilt_identity_for_gamma() {
        let b = BaseDistribution::gamma(2.0_f64, 1.0).unwrap();
        assert!(tilt_identity_residual(&b, 0.4, 0.2).unwrap() < 1e-12);
    }
}
