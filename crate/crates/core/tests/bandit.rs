//! Confidence sets, the optimistic rule, simulated runs and the supporting lemmas.

use approx::assert_relative_eq;
use nef_bandit::bandit::{
    circle_arms, confidence_radius, elliptical_potential_check, exact_membership, optimistic_choice,
    regularizer_schedule, relaxed_membership, run_ofu_glb_seeded, self_bounding_check, theoretical_regret_bound,
    ConfidenceState, GlbInstance, InstanceSpec, StretchSource,
};
use nef_bandit::glm::{fit_mle, ArmCounts};
use nef_bandit::linalg::norm;
use nef_bandit::nef::{BaseDistribution, NefFamily};
use nef_bandit::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

type Base = BaseDistribution<f64>;

fn instance(arms: Vec<Vec<f64>>, theta: Vec<f64>, base: Base) -> GlbInstance<f64> {
    GlbInstance::new(InstanceSpec::new(arms, theta, base)).unwrap()
}

#[test]
fn single_arm_is_always_chosen() {
    let inst = instance(vec![vec![0.3, 0.4]], vec![1.0, 0.0], Base::bernoulli(0.5).unwrap());
    let state = ConfidenceState::new(&inst, &ArmCounts::new(inst.arms.clone()), 0, 10, 0.1, vec![0.0, 0.0]).unwrap();
    assert_eq!(optimistic_choice(&inst, &state).unwrap().0, 0);
}

#[test]
fn first_round_picks_the_longest_arm() {
    let arms = vec![vec![0.5, 0.0], vec![0.0, 0.9], vec![-0.7, 0.0]];
    let inst = instance(arms, vec![0.5, 0.0], Base::bernoulli(0.5).unwrap());
    let state = ConfidenceState::new(&inst, &ArmCounts::new(inst.arms.clone()), 0, 100, 0.1, vec![0.0, 0.0]).unwrap();
    let (arm, index) = optimistic_choice(&inst, &state).unwrap();
    assert_eq!(arm, 1);
    let lam = inst.lambda(100, 0.1);
    assert_relative_eq!(index, inst.c_factor() * state.gamma_t * 0.9 / lam.sqrt(), max_relative = 1e-12);
}

#[test]
fn estimate_direction_breaks_symmetry() {
    let arms = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
    let inst = instance(arms, vec![0.5, 0.0], Base::gaussian(1.0).unwrap());
    let state = ConfidenceState::new(&inst, &ArmCounts::new(inst.arms.clone()), 0, 100, 0.1, vec![3.0, 0.0]).unwrap();
    assert_eq!(optimistic_choice(&inst, &state).unwrap().0, 1);
}

#[test]
fn ties_go_to_the_lowest_index() {
    let arms = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
    let inst = instance(arms, vec![0.5, 0.0], Base::gaussian(1.0).unwrap());
    let state = ConfidenceState::new(&inst, &ArmCounts::new(inst.arms.clone()), 0, 100, 0.1, vec![0.0, 0.0]).unwrap();
    assert_eq!(optimistic_choice(&inst, &state).unwrap().0, 0);
}

#[test]
fn all_optimal_arms_give_zero_regret() {
    let base = Base::exponential(1.0).unwrap().centered().unwrap();
    let mut spec = InstanceSpec::new(circle_arms(5, 1.0), vec![0.0, 0.0], base);
    spec.s0 = Some(0.5);
    let inst = GlbInstance::new(spec).unwrap();
    let out = run_ofu_glb_seeded(&inst, 200, 0.1, 3, 0).unwrap();
    assert_eq!(out.regret(), 0.0);
    assert!(out.diagnostics.aborted.is_none());
}

#[test]
fn bernoulli_regret_stays_below_the_bound() {
    let arms = vec![
        vec![1.0, 0.0, 0.0],
        vec![0.0, 1.0, 0.0],
        vec![0.0, 0.0, 1.0],
        vec![0.5, 0.5, 0.5],
        vec![-0.6, 0.0, 0.8],
    ];
    let inst = instance(arms, vec![0.8, -0.4, 0.2], Base::bernoulli(0.5).unwrap());
    let bound = theoretical_regret_bound(&inst, 5000, 0.05);
    let outs = nef_bandit::harness::run_replicates(&inst, 5000, 0.05, 11, 50).unwrap();
    for t in (100..=5000).step_by(100) {
        let mean = outs.iter().map(|o| o.regret_at(t)).sum::<f64>() / outs.len() as f64;
        assert!(mean <= bound.total, "t = {t}");
    }
}

#[test]
fn relaxed_set_contains_the_exact_set() {
    let inst = instance(circle_arms(6, 1.0), vec![0.5, 0.2], Base::poisson(1.0).unwrap());
    let mut rng = ChaCha20Rng::seed_from_u64(4);
    let mut counts = ArmCounts::new(inst.arms.clone());
    for _ in 0..60 {
        let a = rng.random_range(0..6);
        let u = nef_bandit::linalg::dot(&inst.arms[a], &inst.theta_star);
        counts.record(a, inst.family.sample_tilted(u, &mut rng).unwrap());
    }
    let lam = inst.lambda(60, 0.1);
    let fit = fit_mle(&inst.family, &counts, lam, &[0.0, 0.0], 100).unwrap();
    let state = ConfidenceState::new(&inst, &counts, 60, 60, 0.1, fit.theta_hat).unwrap();
    let mut inside = 0;
    for _ in 0..400 {
        let th: Vec<f64> = (0..2).map(|_| rng.random_range(-1.0..1.0) * inst.s0).collect();
        if norm(&th) > inst.s0 {
            continue;
        }
        if exact_membership(&inst, &state, &counts, &th).unwrap() {
            inside += 1;
            assert!(relaxed_membership(&inst, &state, &th));
        }
    }
    assert!(inside > 0);
    assert!(exact_membership(&inst, &state, &counts, &[2.0, 0.0]).is_err());
}

#[test]
fn zero_stretch_kills_the_second_and_third_terms() {
    let inst = instance(circle_arms(4, 1.0), vec![0.5, 0.0], Base::gaussian(1.0).unwrap());
    assert_eq!(inst.k, 0.0);
    let b = theoretical_regret_bound(&inst, 1000, 0.05);
    assert_eq!((b.term2, b.term3), (0.0, 0.0));
    assert_eq!(b.total, b.term1);
    assert_eq!(b.c, 1.0);
}

#[test]
fn schedule_and_radius_shapes() {
    let inst = instance(circle_arms(4, 1.0), vec![0.5, 0.0], Base::exponential(1.0).unwrap());
    let l = regularizer_schedule(&inst, 1000, 0.05);
    assert!(l >= 1.0);
    assert!(regularizer_schedule(&inst, 10_000, 0.05) > l);
    assert!(regularizer_schedule(&inst, 1000, 1e-6) > l);
    assert!(confidence_radius(&inst, 500, 1000, 0.05) > confidence_radius(&inst, 10, 1000, 0.05));
}

#[test]
fn certified_stretch_is_larger_than_exact() {
    let mut spec = InstanceSpec::new(circle_arms(4, 1.0), vec![0.5, 0.0], Base::exponential(1.0).unwrap());
    let exact = GlbInstance::new(spec.clone()).unwrap();
    spec.stretch = StretchSource::Certified;
    let cert = GlbInstance::new(spec).unwrap();
    assert!(cert.k > exact.k);
    assert!(cert.m >= cert.k / 2f64.ln());
}

#[test]
fn elliptical_potential_rejects_long_vectors() {
    let vs = vec![vec![0.6, 0.0], vec![1.5, 0.0]];
    assert!(matches!(elliptical_potential_check(&vs, 1.0, 1.0), Err(Error::InvalidArgument(_))));
}

#[test]
fn self_bounding_needs_points_below_b() {
    let f = NefFamily::new(Base::exponential(1.0).unwrap(), -0.5, 0.5).unwrap();
    assert!(self_bounding_check(&f, &[0.1, 0.4], 0.2, 4.0).is_err());
    assert!(self_bounding_check(&f, &[0.1, -0.4], 0.2, 4.0).unwrap().ok);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn elliptical_potential_holds(seed in 0u64..1000, d in 1usize..5, lam in 0.05..4.0_f64, a in 0.2..2.0_f64) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let vs: Vec<Vec<f64>> = (0..500)
            .map(|_| {
                let v: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
                let n = norm(&v).max(1e-12);
                let r = a * rng.random_range(0.0..1.0_f64);
                v.iter().map(|x| x / n * r).collect()
            })
            .collect();
        prop_assert!(elliptical_potential_check(&vs, lam, a).unwrap().ok);
    }

    #[test]
    fn self_bounding_holds_for_poisson(b in -0.5..0.8_f64, pts in proptest::collection::vec(0.0..1.0_f64, 1..50)) {
        let f = NefFamily::new(Base::poisson(2.0).unwrap(), -0.5, 0.8).unwrap();
        // Gamma = 1 everywhere for Poisson
        let k = 1.0;
        let pts: Vec<f64> = pts.iter().map(|t| -0.5 + t * (b + 0.5)).collect();
        prop_assert!(self_bounding_check(&f, &pts, b, k).unwrap().ok);
    }
}
