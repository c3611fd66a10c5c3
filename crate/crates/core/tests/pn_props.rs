mod common;

use common::{ddf_plus, dyadic_probs};
use menger_core::pn_space::{
    n0_of_epsilon, pn_axiom_check, pn_c_contraction_check, scale, threshold_implication,
    threshold_implication_dense, LAMBDA_GRID,
};
use menger_core::{AffineMap, EPoint, FinitePnSpace, Mode, SelfMap, Vector};
use proptest::collection::vec;
use proptest::prelude::*;

fn vectors(n: usize, dim: usize, count: usize) -> impl Strategy<Value = Vec<Vector>> {
    vec(vec(vec(-16i32..=16, dim), n), 1..=count).prop_map(|vs| {
        vs.into_iter()
            .map(|v| EPoint::new(v.into_iter().map(|x| x.into_iter().map(|c| c as f64 / 8.0).collect()).collect()))
            .collect()
    })
}

fn space_and_samples() -> impl Strategy<Value = (FinitePnSpace, Vec<Vector>)> {
    (dyadic_probs(4), 1usize..=2).prop_flat_map(|(prob, dim)| {
        let n = prob.len();
        (Just(FinitePnSpace::with_defaults(prob, dim).unwrap()), vectors(n, dim, 8))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn e_norms_satisfy_the_axioms((space, samples) in space_and_samples()) {
        for s in &samples {
            prop_assert!(space.pn_norm(s).unwrap().in_d_plus());
        }
        let report = pn_axiom_check(&space, &samples, &LAMBDA_GRID).unwrap();
        prop_assert!(report.passed(), "{:?}", report.violations);
    }

    #[test]
    fn threshold_decision_agrees_with_dense_evaluation(nu in ddf_plus(), nu_f in ddf_plus(), kk in 1u32..16) {
        let k = kk as f64 / 16.0;
        for mode in [Mode::Unscaled, Mode::Strict] {
            prop_assert_eq!(
                threshold_implication(&nu, &nu_f, k, mode).is_some(),
                threshold_implication_dense(&nu, &nu_f, k, mode).is_some()
            );
        }
        if threshold_implication(&nu, &nu_f, k, Mode::Strict).is_none() {
            prop_assert!(threshold_implication(&nu, &nu_f, k, Mode::Unscaled).is_none());
        }
    }

    #[test]
    fn scalar_contractions_pass_the_unscaled_mode((space, samples) in space_and_samples(), kk in 1u32..8, jj in 1u32..8) {
        let k = kk as f64 / 8.0;
        let k2 = k * jj.min(kk) as f64 / kk as f64;
        let f = |p: &Vector| scale(k2, p);
        let report = pn_c_contraction_check(&space, &f, k, &samples).unwrap();
        prop_assert!(report.passed(Mode::Unscaled));
        prop_assert!(report.dense_agrees());
    }

    #[test]
    fn n0_is_the_first_index_with_small_tail(kk in 1u32..16, ee in 1u32..16) {
        let (k, eps) = (kk as f64 / 16.0, ee as f64 / 16.0);
        let n0 = n0_of_epsilon(eps, k).unwrap();
        let direct = (1..).find(|&n| k.powi(n) * (1.0 + eps) <= eps).unwrap() as usize;
        prop_assert_eq!(n0, direct);
    }

    #[test]
    fn linear_contractions_fix_only_theta(
        (space, samples) in space_and_samples(),
        kk in 1u32..4,
    ) {
        let k = kk as f64 / 4.0;
        let dim = space.dim();
        let mut rows = vec![vec![0.0; dim]; dim];
        for (i, row) in rows.iter_mut().enumerate() {
            row[(i + 1) % dim] = k;
        }
        let f = AffineMap::linear(rows).unwrap();
        for p in samples.iter().chain([&space.theta()]) {
            if f.apply(p) == *p {
                prop_assert!(space.is_theta(p));
            }
        }
    }
}
