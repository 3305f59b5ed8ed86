//! Invariants of the exponential-family oracles, as property tests.

use approx::assert_relative_eq;
use nef_bandit::nef::{BaseDistribution, NefFamily};
use proptest::prelude::*;

type Base = BaseDistribution<f64>;

/// A base together with a tilt range well inside its domain.
fn any_base() -> impl Strategy<Value = (Base, f64, f64)> {
    prop_oneof![
        (0.05..0.95_f64).prop_map(|p| (Base::bernoulli(p).unwrap(), -4.0, 4.0)),
        (0.3..3.0_f64).prop_map(|s| (Base::gaussian(s).unwrap(), -3.0, 3.0)),
        (0.5..3.0_f64).prop_map(|r| (Base::exponential(r).unwrap(), -2.0 * r, 0.8 * r)),
        (0.3..5.0_f64).prop_map(|nu| (Base::poisson(nu).unwrap(), -2.0, 1.5)),
        (0.5..2.0_f64).prop_map(|b| (Base::laplace(b).unwrap(), -0.8 / b, 0.8 / b)),
        (0.5..4.0_f64, 0.5..2.0_f64).prop_map(|(k, s)| (Base::gamma(k, s).unwrap(), -2.0 / s, 0.8 / s)),
        (0.1..0.9_f64, -3.0..3.0_f64).prop_map(|(w, y)| {
            (Base::atoms(vec![(y - 1.0, w), (y + 0.5, (1.0 - w) / 2.0), (y + 2.0, (1.0 - w) / 2.0)]).unwrap(), -2.0, 2.0)
        }),
    ]
}

fn within() -> impl Strategy<Value = ((Base, f64, f64), f64)> {
    (any_base(), 0.0..1.0_f64)
}

fn point(lo: f64, hi: f64, t: f64) -> f64 {
    lo + t * (hi - lo)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tilted_law_is_normalized(((b, lo, hi), t) in within()) {
        let u = point(lo, hi, t);
        let c = b.law(u).unwrap().central().unwrap();
        prop_assert!((c.mass - 1.0).abs() < 1e-9, "mass {}", c.mass);
        prop_assert_eq!(b.mgf(0.0).unwrap(), 1.0);
    }

    #[test]
    fn derivatives_are_consistent(((b, lo, hi), t) in within()) {
        let u = point(lo, hi, t);
        let h = 1e-4;
        let (m, v) = b.mean_var(u).unwrap();
        let dpsi = (b.cgf(u + h).unwrap() - b.cgf(u - h).unwrap()) / (2.0 * h);
        let dmu = (b.mean(u + h).unwrap() - b.mean(u - h).unwrap()) / (2.0 * h);
        let dvar = (b.mean_var(u + h).unwrap().1 - b.mean_var(u - h).unwrap().1) / (2.0 * h);
        let third = b.moments(u).unwrap().third_central;
        prop_assert!((dpsi - m).abs() <= 1e-6 * (1.0 + m.abs()), "{dpsi} vs {m}");
        prop_assert!((dmu - v).abs() <= 1e-6 * (1.0 + v), "{dmu} vs {v}");
        prop_assert!((dvar - third).abs() <= 1e-5 * (1.0 + third.abs()), "{dvar} vs {third}");
    }

    #[test]
    fn mean_is_increasing(((b, lo, hi), t) in within(), dt in 0.01..0.5_f64) {
        let u = point(lo, hi, t * (1.0 - dt));
        let w = point(lo, hi, t * (1.0 - dt) + dt);
        prop_assert!(b.mean(w).unwrap() > b.mean(u).unwrap());
        prop_assert!(b.mean_var(u).unwrap().1 > 0.0);
    }

    #[test]
    fn tilts_compose(((b, lo, hi), t) in within(), r in 0.0..1.0_f64) {
        let s = point(lo, hi, 0.5 + 0.4 * (r - 0.5)) * 0.5;
        let tb = b.tilted(s).unwrap();
        let u = point(lo, hi, t) - s;
        prop_assume!(b.contains(u + s) && tb.contains(u));
        let (m1, v1) = tb.mean_var(u).unwrap();
        let (m2, v2) = b.mean_var(u + s).unwrap();
        assert_relative_eq!(m1, m2, epsilon = 1e-12, max_relative = 1e-10);
        assert_relative_eq!(v1, v2, epsilon = 1e-12, max_relative = 1e-10);
        let lhs = tb.cgf(u).unwrap();
        let rhs = b.cgf(u + s).unwrap() - b.cgf(s).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()), "{lhs} vs {rhs}");
    }

    #[test]
    fn shift_changes_only_the_mean(((b, lo, hi), t) in within(), c in -5.0..5.0_f64) {
        let u = point(lo, hi, t);
        let s = b.shifted(c);
        let (m, v) = b.mean_var(u).unwrap();
        let (ms, vs) = s.mean_var(u).unwrap();
        prop_assert!((ms - m - c).abs() < 1e-10 * (1.0 + m.abs() + c.abs()));
        prop_assert!((vs - v).abs() <= 1e-12 * v);
        let (g, gs) = (b.gamma_ratio(u).unwrap(), s.gamma_ratio(u).unwrap());
        prop_assert!((g - gs).abs() <= 1e-8 * (1.0 + g), "{g} vs {gs}");
    }

    #[test]
    fn reflection_mirrors(((b, lo, hi), t) in within()) {
        let u = point(lo, hi, t);
        let r = b.reflected();
        let (m, v) = b.mean_var(u).unwrap();
        let (mr, vr) = r.mean_var(-u).unwrap();
        prop_assert!((m + mr).abs() < 1e-12 * (1.0 + m.abs()));
        prop_assert!((v - vr).abs() <= 1e-12 * v);
        let (g, gr) = (b.gamma_ratio(u).unwrap(), r.gamma_ratio(-u).unwrap());
        prop_assert!((g - gr).abs() <= 1e-8 * (1.0 + g));
        prop_assert_eq!(r.reflected().mean(u).unwrap(), b.mean(u).unwrap());
    }

    #[test]
    fn moments_agree_with_fast_path(((b, lo, hi), t) in within()) {
        let u = point(lo, hi, t);
        let (m, v) = b.mean_var(u).unwrap();
        let rep = b.moments(u).unwrap();
        prop_assert!((rep.mean - m).abs() <= 1e-8 * (1.0 + m.abs()));
        prop_assert!((rep.variance - v).abs() <= 1e-8 * v);
        prop_assert!(rep.third_absolute + 1e-9 >= rep.third_central.abs());
    }

    #[test]
    fn family_range_is_enforced(((b, lo, hi), t) in within()) {
        let f = NefFamily::new(b.clone(), lo, hi).unwrap();
        let u = point(lo, hi, t);
        prop_assert_eq!(f.mean_fn(u).unwrap(), b.mean(u).unwrap());
        let (_, dhi) = b.domain();
        if dhi.is_finite() {
            prop_assert!(NefFamily::new(b, lo, dhi).is_err());
        }
    }
}

#[test]
fn exponential_closed_forms() {
    let b = Base::exponential(2.0).unwrap();
    let u = 0.5_f64;
    assert_relative_eq!(b.mgf(u).unwrap(), 2.0 / 1.5, max_relative = 1e-15);
    let (m, v) = b.mean_var(u).unwrap();
    assert_relative_eq!(m, 1.0 / 1.5, max_relative = 1e-15);
    assert_relative_eq!(v, 1.0 / 2.25, max_relative = 1e-15);
    assert_relative_eq!(b.gamma_ratio(u).unwrap(), 2.0 / 1.5, max_relative = 1e-12);
    assert_eq!(b.mgf(2.0).unwrap(), f64::INFINITY);
    assert!(b.cgf(2.0).is_err());
}

#[test]
fn laplace_mgf_by_quadrature() {
    use nef_bandit::quadrature::{integrate_tail, Direction, Tolerance};
    let b = Base::laplace(1.0).unwrap();
    let f = |y: f64| 0.5 * (-y.abs()).exp() * (0.5 * y).exp();
    let tol = Tolerance::default();
    let direct = integrate_tail(&f, 0.0, Direction::Up, 1.0, tol).unwrap().value
        + integrate_tail(&f, 0.0, Direction::Down, 1.0, tol).unwrap().value;
    assert_relative_eq!(b.mgf(0.5).unwrap(), direct, max_relative = 1e-10);
    assert_relative_eq!(direct, 1.0 / 0.75, max_relative = 1e-10);
}

#[test]
fn poisson_moments_closed_form() {
    let b = Base::poisson(2.0).unwrap();
    let rep = b.moments(0.3).unwrap();
    let nu = 2.0 * 0.3_f64.exp();
    assert_relative_eq!(rep.variance, nu, max_relative = 1e-10);
    assert_relative_eq!(rep.third_central, nu, max_relative = 1e-10);
}

#[test]
fn f32_agrees_with_f64() {
    let b32 = BaseDistribution::<f32>::gamma(2.0, 1.0).unwrap();
    let b64 = Base::gamma(2.0, 1.0).unwrap();
    let (m32, v32) = b32.mean_var(0.3).unwrap();
    let (m64, v64) = b64.mean_var(0.3).unwrap();
    assert!(((m32 as f64) - m64).abs() < 1e-5 * m64);
    assert!(((v32 as f64) - v64).abs() < 1e-5 * v64);
}
