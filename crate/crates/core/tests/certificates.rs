//! Stretch certificates, witnesses, the subgaussian envelope, the counterexample and the tail lemmas.

use approx::assert_relative_eq;
use nef_bandit::nef::{linspace, BaseDistribution, NefFamily};
use nef_bandit::scc::{
    counterexample_distribution, dominance_grid, find_support_witness, fit_tail_constants, subgaussian_stretch_bound,
    verify_lower_bound, verify_lower_bound_with, witness_mass, StretchCertificate, SupportWitness,
};
use nef_bandit::tails::{
    certify_tail, certify_tilted_tails, mgf_from_tail_bound, tilt_identity_residual, tilted_cgf_quadratic_bound,
    verify_tilted_tails, verify_variance_lower_bound, Side,
};
use nef_bandit::Error;
use proptest::prelude::*;

type Base = BaseDistribution<f64>;

#[test]
fn laplace_witness_mass() {
    let b = Base::laplace(1.0).unwrap();
    let eta = witness_mass(&b, 0.25, 1.0).unwrap();
    assert_relative_eq!(eta, ((-0.25f64).exp() - (-1.0f64).exp()) / 2.0, max_relative = 1e-10);
    let w = find_support_witness(&b).unwrap();
    assert!(w.holds_for(&b).unwrap());
}

#[test]
fn symmetric_base_has_symmetric_tails() {
    let t = fit_tail_constants(&Base::laplace(1.0).unwrap(), (0.9, 0.9)).unwrap();
    assert_relative_eq!(t.scale1, t.scale2, max_relative = 1e-12);
}

#[test]
fn dirac_has_no_witness() {
    assert!(matches!(find_support_witness(&Base::dirac(1.0).unwrap()), Err(Error::Degenerate(_))));
    assert_eq!(Base::dirac(1.0).unwrap().gamma_ratio(0.3).unwrap(), 0.0);
}

#[test]
fn laplace_dominance_on_symmetric_grid() {
    let b = Base::laplace(1.0).unwrap();
    let cert = StretchCertificate::build(&b, None).unwrap();
    let pts = dominance_grid(&b, &cert, &linspace(-0.89, 0.89, 179), 1.0).unwrap();
    assert!(pts.iter().all(|p| p.ok));
    // the bound is far from tight
    assert!(pts.iter().all(|p| p.ratio < 0.01 * p.bound));
}

#[test]
fn certificate_reflects() {
    let b = Base::exponential(1.0).unwrap();
    let c = StretchCertificate::build(&b, None).unwrap();
    let r = c.reflected().unwrap();
    // u = 0 belongs to the right branch on both sides, so mirror only nonzero points
    for u in [-0.5, -0.1, 0.4] {
        assert_relative_eq!(c.bound(u).unwrap(), r.bound(-u).unwrap(), max_relative = 1e-12);
    }
    let rb = StretchCertificate::build(&b.reflected(), Some((c.tail.c2, c.tail.c1))).unwrap();
    assert_relative_eq!(rb.bound(-0.4).unwrap(), c.bound(0.4).unwrap(), max_relative = 1e-6);
}

#[test]
fn shift_leaves_the_certificate_unchanged() {
    let b = Base::gamma(2.0, 1.0).unwrap();
    let c = StretchCertificate::build(&b, None).unwrap();
    let s = StretchCertificate::build(&b.shifted(3.5), None).unwrap();
    for u in [-0.8, 0.0, 0.7] {
        assert_relative_eq!(c.bound(u).unwrap(), s.bound(u).unwrap(), max_relative = 1e-8);
    }
}

#[test]
fn subgaussian_envelope_dominates_gaussian() {
    let b = Base::gaussian(1.0).unwrap();
    let w = find_support_witness(&b).unwrap();
    for u in linspace(-5.0, 5.0, 41) {
        assert!(subgaussian_stretch_bound(1.0, &w, u).unwrap() >= b.gamma_ratio(u).unwrap());
    }
    let (b1, b2) = (subgaussian_stretch_bound(1.0, &w, 10.0).unwrap(), subgaussian_stretch_bound(1.0, &w, 20.0).unwrap());
    // linear growth in |u|
    assert!((b2 - b1) > 0.0 && ((b2 - b1) / 10.0 - (b1 - subgaussian_stretch_bound(1.0, &w, 0.0).unwrap()) / 10.0).abs() < 1e-9 * b2);
}

#[test]
fn counterexample_is_normalized_and_truncation_stable() {
    let c = counterexample_distribution::<f64>(30).unwrap();
    assert_relative_eq!(c.base.law(0.0).unwrap().central().unwrap().mass, 1.0, max_relative = 1e-12);
    let a = verify_lower_bound_with::<f64>(4, 6).unwrap();
    let b = verify_lower_bound_with::<f64>(4, 24).unwrap();
    assert_eq!(a.mean, b.mean);
    assert!(verify_lower_bound_with::<f64>(5, 30).is_err());
    assert!(verify_lower_bound_with::<f64>(4, 5).is_err());
}

#[test]
fn counterexample_ratio_grows_linearly() {
    for i in [4u32, 6, 8, 10] {
        let r = verify_lower_bound::<f64>(i).unwrap();
        assert!(r.ratio_ok, "i = {i}");
        assert_relative_eq!(r.ratio, 0.3 * r.u, max_relative = 1e-9);
        let r32 = verify_lower_bound::<f32>(i).unwrap();
        assert!(((r32.mean as f64) - r.mean).abs() <= 1e-6 * r.mean);
    }
}

#[test]
fn tail_certificates_for_exponential() {
    let b = Base::exponential(1.0).unwrap();
    let t = fit_tail_constants(&b, (0.9, 1.0)).unwrap();
    let ts = linspace(0.0, 30.0, 61);
    assert!(certify_tail(&b, Side::Right, t.c1, t.scale1, &ts).unwrap().ok);
    assert!(certify_tail(&b, Side::Left, t.c2, t.scale2, &ts).unwrap().ok);
    // a scale too small for the tail is caught
    assert!(!certify_tail(&b, Side::Both, 1.0, 0.1, &ts).unwrap().ok);
    let c = b.centered().unwrap();
    for lam in linspace(0.0, 0.85, 18) {
        assert!(c.mgf(lam).unwrap() <= mgf_from_tail_bound(t.c1, t.scale1, lam).unwrap() + 1e-10);
    }
}

#[test]
fn laplace_tilted_tails_at_fixed_levels() {
    let b = Base::laplace(1.0).unwrap();
    let t = fit_tail_constants(&b, (0.9, 0.9)).unwrap();
    for lvl in [0.0, 1.0, 2.0, 4.0] {
        assert!(verify_tilted_tails(&b, &t, 0.4, lvl).unwrap().ok);
    }
    assert!(certify_tilted_tails(&b, 0.4, 0.2, &linspace(0.0, 20.0, 41)).unwrap().ok);
    assert!(tilt_identity_residual(&b, 0.4, 0.3).unwrap() < 1e-10);
}

#[test]
fn quadratic_cgf_bound_admissibility() {
    let f = NefFamily::new(Base::exponential(1.0).unwrap(), -0.5, 0.5).unwrap();
    let k = 4.0;
    let r = 2f64.ln() / k;
    for s in linspace(-r, r, 11) {
        assert!(tilted_cgf_quadratic_bound(&f, k, 0.3, s).unwrap().ok, "s = {s}");
    }
    let err = tilted_cgf_quadratic_bound(&f, k, 0.3, 1.1 * r).unwrap_err().to_string();
    assert!(err.contains("ln 2 / K"), "{err}");
    // s must also keep u + s inside the domain: hi - S1 = 0.5
    assert!(tilted_cgf_quadratic_bound(&f, 0.5, 0.3, 0.6).is_err());
    assert!(tilted_cgf_quadratic_bound(&f, 0.0, 0.3, 0.45).unwrap().ok);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn stretch_bound_dominates_random_atoms(
        locs in proptest::collection::vec(-3.0..3.0_f64, 2..6),
        ws in proptest::collection::vec(0.05..1.0_f64, 6),
    ) {
        let total: f64 = ws[..locs.len()].iter().sum();
        let atoms: Vec<(f64, f64)> = locs.iter().zip(&ws).map(|(&y, &w)| (y, w / total)).collect();
        let b = Base::atoms(atoms).unwrap();
        prop_assume!(!b.is_degenerate() && b.mean_var(0.0).unwrap().1 > 1e-6);
        let cert = StretchCertificate::build(&b, None).unwrap();
        let grid = linspace(-0.9 * cert.tail.c2, 0.9 * cert.tail.c1, 60);
        let pts = dominance_grid(&b, &cert, &grid, 1.0).unwrap();
        prop_assert!(pts.iter().all(|p| p.ok));
    }

    #[test]
    fn variance_floor_holds(rate in 0.5..3.0_f64, t in 0.0..0.85_f64) {
        let b = Base::exponential(rate).unwrap();
        let w = find_support_witness(&b.centered().unwrap()).unwrap();
        prop_assert!(verify_variance_lower_bound(&b, &w, t * rate).unwrap().ok);
    }

    #[test]
    fn witness_constructor_validates(a in -1.0..2.0_f64, b in -1.0..2.0_f64, eta in -0.5..1.5_f64) {
        let ok = SupportWitness::new(a, b, eta).is_ok();
        prop_assert_eq!(ok, a > 0.0 && b >= a && eta > 0.0 && eta <= 1.0);
    }
}
