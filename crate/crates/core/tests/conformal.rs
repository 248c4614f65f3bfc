use proptest::prelude::*;
use uncervals_core::conformal::{
    bootstrap_phi, calibrate_scores, interval_distribution, prediction_set, quantile_index, BorderScores, Mode,
};
use uncervals_core::estimators::{ConditionalCdf, OracleModel};
use uncervals_core::{calibrate, make_split, simulate, Link, Scenario};

fn scores_strategy() -> impl Strategy<Value = BorderScores> {
    prop::collection::vec((0.0f64..1.0, 0.0f64..1.0, any::<bool>()), 1..60).prop_map(|rows| {
        let (mut lambda, mut upsilon) = (Vec::new(), Vec::new());
        for (a, b, collapse) in rows {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            lambda.push(lo);
            upsilon.push(if collapse { lo } else { hi });
        }
        BorderScores::new(lambda, upsilon).unwrap()
    })
}

fn kth_smallest(values: &[f64], k: usize) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v[k - 1]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn calibration_outputs_respect_their_ranges(
        scores in scores_strategy(),
        alpha in 0.01f64..0.99,
        b in 0.0f64..=1.0,
        estar in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let mode = if estar { Mode::Estar } else { Mode::E0 };
        let c = calibrate_scores(&scores, alpha, b, mode, seed, 10.0);
        let n = scores.len();
        prop_assert_eq!(c.phi_star.len(), n);
        prop_assert!(c.phi_star.iter().all(|p| (0.0..=1.0).contains(p)));
        if mode == Mode::E0 {
            prop_assert!(c.phi_star.iter().all(|p| scores.lambda.contains(p)));
        }
        let vmax = b.max(1.0 - b);
        prop_assert!(c.v_star.iter().all(|v| (0.0..=vmax + 1e-15).contains(v)));
        let k = ((1.0 - alpha) * (n as f64 + 1.0) - 1e-9).ceil() as usize;
        prop_assert_eq!(c.k, k.max(1));
        if c.k > n {
            prop_assert_eq!(c.q_hat, f64::INFINITY);
        } else {
            prop_assert_eq!(c.q_hat, kth_smallest(&c.v_star, c.k));
        }
    }

    #[test]
    fn interval_distribution_is_a_cdf_on_unit_interval(scores in scores_strategy()) {
        prop_assert_eq!(interval_distribution(&scores, -1e-12), 0.0);
        prop_assert_eq!(interval_distribution(&scores, 1.0), 1.0);
        let mut prev = 0.0;
        for i in 0..=200 {
            let v = interval_distribution(&scores, i as f64 / 200.0);
            prop_assert!(v >= prev - 1e-15);
            prev = v;
        }
    }

    #[test]
    fn collapsed_scores_give_the_ecdf(points in prop::collection::vec(0.0f64..1.0, 1..40), t in 0.0f64..1.0) {
        let scores = BorderScores::new(points.clone(), points.clone()).unwrap();
        let ecdf = points.iter().filter(|p| **p <= t).count() as f64 / points.len() as f64;
        prop_assert!((interval_distribution(&scores, t) - ecdf).abs() <= 1e-12);
    }

    #[test]
    fn set_membership_matches_score_condition(
        x in -2.0f64..2.0,
        q_hat in 0.01f64..0.6,
        b in 0.0f64..=1.0,
        t in 0.01f64..4.0,
    ) {
        let m = OracleModel::new(2.0, 1.0, Link::AbsLinear { coefs: vec![-0.3] }).unwrap();
        let set = prediction_set(&m, &[x], q_hat, b, 0.1, 1e3);
        let score = (m.cdf(t, &[x]) - b).abs();
        prop_assume!((score - q_hat).abs() > 1e-6);
        prop_assert_eq!(set.contains(t), score <= q_hat);
        prop_assert!(set.lo >= 0.0);
        if b == 1.0 {
            prop_assert!(set.is_ray());
        }
    }

    #[test]
    fn lpb_is_nondecreasing_in_alpha(seed in 0u64..400, a1 in 0.02f64..0.5, gap in 0.0f64..0.4) {
        let a2 = (a1 + gap).min(0.95);
        let data = simulate(&Scenario::AbsLink.config(80, seed)).unwrap().dataset;
        let oracle = OracleModel::new(2.0, 1.0, Link::AbsLinear { coefs: vec![-0.3] }).unwrap();
        let split = make_split(data.len(), 0.5, seed).unwrap();
        let calib = data.subset(&split.calibration_indices).unwrap();
        let lo = |alpha: f64| {
            let c = calibrate(&oracle, &calib, alpha, 1.0, Mode::Estar, seed ^ 7, 100.0).unwrap();
            prediction_set(&oracle, &[0.5], c.q_hat, 1.0, alpha, 100.0).lpb()
        };
        prop_assert!(lo(a1) <= lo(a2) + 1e-9);
    }
}

#[test]
fn single_row_e0_always_returns_its_left_score() {
    let scores = BorderScores::new(vec![0.3], vec![0.7]).unwrap();
    for seed in 0..50 {
        assert_eq!(bootstrap_phi(&scores, Mode::E0, seed), vec![0.3]);
    }
}

#[test]
fn quantile_index_saturates_beyond_sample() {
    assert_eq!(quantile_index(5, 0.1), 6);
    let scores = BorderScores::new(vec![0.1; 5], vec![0.2; 5]).unwrap();
    assert_eq!(calibrate_scores(&scores, 0.1, 1.0, Mode::Estar, 0, 1.0).q_hat, f64::INFINITY);
}

#[test]
fn bootstrap_ecdf_tracks_the_interval_distribution() {
    let n = 50;
    let lambda: Vec<f64> = (0..n).map(|i| ((i * 37) % n) as f64 / n as f64 * 0.8).collect();
    let upsilon: Vec<f64> = lambda
        .iter()
        .enumerate()
        .map(|(i, l)| if i % 7 == 0 { *l } else { l + 0.2 * ((i % 5) as f64 / 4.0) })
        .collect();
    let scores = BorderScores::new(lambda, upsilon).unwrap();
    let mut draws = Vec::with_capacity(100_000);
    for seed in 0..(100_000 / n as u64) {
        draws.extend(bootstrap_phi(&scores, Mode::Estar, seed));
    }
    draws.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let total = draws.len() as f64;
    let mut worst: f64 = 0.0;
    for i in 0..=1000 {
        let t = i as f64 / 1000.0;
        let ecdf = draws.partition_point(|d| *d <= t) as f64 / total;
        worst = worst.max((ecdf - interval_distribution(&scores, t)).abs());
    }
    assert!(worst < 0.01, "sup distance {worst}");
}
