mod common;

use common::*;
use proptest::prelude::*;
use tlbounds::divergence::{discrepancy, hdh_divergence, rademacher, LossSpec, Measure, RademacherMode};
use tlbounds::domains::{sample_labeled, sample_unlabeled, DiscreteDomain};
use tlbounds::erm::{erm, ideal_risk, weighted_objective, WeightedRiskSpec};

fn third_domain(pr: &Problem, seed: u64) -> DiscreteDomain {
    let mut r = rng(seed);
    let n = pr.ground.len();
    DiscreteDomain::with_labels(pr.ground.clone(), random_probs(&mut r, n), random_binary(&mut r, n)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn hdh_is_symmetric_and_bounded(seed in any::<u64>()) {
        let pr = random_problem(seed, 10, 12);
        let (p, q) = (Measure::from(&pr.source), Measure::from(&pr.target));
        let pq = hdh_divergence(&pr.class, &p, &q).unwrap();
        let qp = hdh_divergence(&pr.class, &q, &p).unwrap();
        prop_assert_eq!(pq, qp);
        prop_assert!((0.0..=2.0).contains(&pq));
        prop_assert_eq!(hdh_divergence(&pr.class, &p, &p).unwrap(), 0.0);
    }

    #[test]
    fn discrepancy_obeys_triangle_inequality(seed in any::<u64>(), squared in any::<bool>()) {
        let pr = random_problem(seed, 10, 12);
        let loss = if squared { LossSpec::SQUARED } else { LossSpec::ZERO_ONE };
        let r = third_domain(&pr, seed ^ 0x5eed);
        let (p, q, r) = (Measure::from(&pr.source), Measure::from(&pr.target), Measure::from(&r));
        let pr_ = discrepancy(&pr.class, loss, &p, &r).unwrap();
        let pq = discrepancy(&pr.class, loss, &p, &q).unwrap();
        let qr = discrepancy(&pr.class, loss, &q, &r).unwrap();
        prop_assert!(pr_ <= pq + qr + 1e-12);
    }

    #[test]
    fn erm_argmin_survives_scaling(seed in any::<u64>(), m in 1usize..40, k in -6i32..6, c in 0.01f64..100.0) {
        let pr = random_problem(seed, 10, 12);
        let s = sample_labeled(&pr.source, m, seed).unwrap();
        let spec = WeightedRiskSpec::new().empirical(0.7, &s).unwrap().expected(0.3, &pr.target).unwrap();
        let base = erm(&spec, &pr.class).unwrap();

        // Power-of-two scaling is exact in floating point.
        let exact = erm(&spec.scaled(2f64.powi(k)).unwrap(), &pr.class).unwrap();
        prop_assert_eq!(exact.index, base.index);
        prop_assert_eq!(exact.objective, base.objective * 2f64.powi(k));

        let scaled = erm(&spec.scaled(c).unwrap(), &pr.class).unwrap();
        prop_assert!((scaled.objective - c * base.objective).abs() <= 1e-12 * scaled.objective.max(1.0));
        let unscaled = weighted_objective(&spec, &scaled.hypothesis).unwrap();
        prop_assert!((unscaled - base.objective).abs() <= 1e-12);
    }

    #[test]
    fn ideal_risk_is_monotone_in_weights(seed in any::<u64>(), w in 0.0f64..3.0, extra in 0.0f64..3.0, which in 0usize..2) {
        let pr = random_problem(seed, 10, 12);
        let mut weights = [w, 1.0];
        let before = ideal_risk(&[(weights[0], &pr.source), (weights[1], &pr.target)], &pr.class).unwrap().objective;
        weights[which] += extra;
        let after = ideal_risk(&[(weights[0], &pr.source), (weights[1], &pr.target)], &pr.class).unwrap().objective;
        prop_assert!(after >= before);
    }

    #[test]
    fn rademacher_is_bounded_and_grows_with_class(seed in any::<u64>(), m in 1usize..10) {
        let pr = random_problem(seed, 8, 10);
        let s = sample_unlabeled(&pr.source, m, seed).unwrap();
        let full = rademacher(&pr.class, &s, RademacherMode::Exact).unwrap().value;
        prop_assert!((0.0..=2.0).contains(&full));
        let first = tlbounds::hypothesis::make_finite_class(pr.ground.clone(), vec![pr.members[0].clone()], 1).unwrap();
        let one = rademacher(&first, &s, RademacherMode::Exact).unwrap().value;
        prop_assert!(one <= full + 1e-12);
    }
}
