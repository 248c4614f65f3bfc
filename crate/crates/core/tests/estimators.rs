use proptest::prelude::*;
use uncervals_core::estimators::turnbull::turnbull_fit;
use uncervals_core::estimators::weibull::{weibull_ph_fit, WeibullOptions, WeibullPhLikelihood};
use uncervals_core::estimators::{ConditionalCdf, OracleModel};
use uncervals_core::rng::{stream_rng, uniform};
use uncervals_core::{simulate, Dataset, FeatureMap, IntervalObservation, Link, Scenario};

fn dataset(rows: &[(f64, f64)]) -> Dataset {
    Dataset::new(rows.iter().map(|&(l, u)| IntervalObservation::new(l, u, vec![]).unwrap()).collect()).unwrap()
}

/// Intervals `(a, b]` with endpoints on a small integer lattice, plus an
/// optional right-censored row.
fn lattice_rows() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0u8..5, 1u8..4, any::<bool>()), 2..12)
        .prop_map(|raw| {
            raw.into_iter()
                .map(|(a, w, open)| {
                    let l = a as f64;
                    let u = if open && a >= 3 { f64::INFINITY } else { (a + w) as f64 };
                    (l, u)
                })
                .collect::<Vec<_>>()
        })
        .prop_filter("needs a finite interval", |rows: &Vec<(f64, f64)>| rows.iter().any(|r| r.1.is_finite()))
}

fn contains(l: f64, u: f64, left: f64, right: f64) -> bool {
    l <= left && right <= u
}

fn loglik_by_containment(rows: &[(f64, f64)], supports: &[(f64, f64)], masses: &[f64]) -> f64 {
    rows.iter()
        .map(|&(l, u)| {
            let p: f64 = supports.iter().zip(masses).filter(|((a, b), _)| contains(l, u, *a, *b)).map(|(_, m)| m).sum();
            p.ln()
        })
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn em_loglik_never_decreases_and_masses_sum_to_one(rows in lattice_rows()) {
        let fit = turnbull_fit(&dataset(&rows), 1e-10, 5000).unwrap();
        for w in fit.loglik_trace.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-10, "{} -> {}", w[0], w[1]);
        }
        let total: f64 = fit.masses.iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-10);
        prop_assert!(fit.masses.iter().all(|m| *m >= 0.0));
    }

    #[test]
    fn npmle_beats_every_point_of_a_simplex_grid(rows in lattice_rows()) {
        let fit = turnbull_fit(&dataset(&rows), 1e-12, 100_000).unwrap();
        let supports: Vec<(f64, f64)> = fit.support_intervals.iter().map(|s| (s.left, s.right)).collect();
        prop_assume!(supports.len() <= 3);
        let own = loglik_by_containment(&rows, &supports, &fit.masses);
        prop_assert!((own - fit.loglik).abs() <= 1e-8 * own.abs().max(1.0));

        let steps = 200;
        let mut best = f64::NEG_INFINITY;
        for i in 0..=steps {
            for j in 0..=(steps - i) {
                let mut m = vec![i as f64 / steps as f64, j as f64 / steps as f64, (steps - i - j) as f64 / steps as f64];
                m.truncate(supports.len());
                if (m.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
                    continue;
                }
                best = best.max(loglik_by_containment(&rows, &supports, &m));
            }
        }
        prop_assert!(fit.loglik >= best - 1e-9, "npmle {} < grid {}", fit.loglik, best);
        prop_assert!(fit.loglik - best < 0.05 * rows.len() as f64);
    }

    #[test]
    fn turnbull_is_the_ecdf_on_exact_data(times in prop::collection::vec(1u16..40, 1..30)) {
        let ts: Vec<f64> = times.iter().map(|t| *t as f64 / 4.0).collect();
        let rows: Vec<(f64, f64)> = ts.iter().map(|t| (*t, *t)).collect();
        let fit = turnbull_fit(&dataset(&rows), 1e-12, 1000).unwrap();
        let n = ts.len() as f64;
        for probe in (0..=45).map(|k| k as f64 / 4.0 + 0.125).chain(ts.iter().copied()) {
            let ecdf = ts.iter().filter(|t| **t <= probe).count() as f64 / n;
            prop_assert!((fit.cdf(probe, &[]) - ecdf).abs() <= 1e-12, "at {}: {} vs {}", probe, fit.cdf(probe, &[]), ecdf);
        }
    }

    #[test]
    fn turnbull_inversion_brackets_the_level(rows in lattice_rows(), q in 0.01f64..0.99) {
        let fit = turnbull_fit(&dataset(&rows), 1e-10, 5000).unwrap();
        let t = fit.invert_survival(q, &[], 100.0);
        if t.is_finite() {
            prop_assert!(fit.survival(t, &[]) <= q + 1e-9);
            if t > 0.0 {
                prop_assert!(fit.survival(t - 1e-9, &[]) >= q - 1e-9);
            }
        } else {
            prop_assert!(fit.survival(100.0, &[]) > q - 1e-9);
        }
    }

    #[test]
    fn smooth_inversion_hits_the_level(q in 0.001f64..0.999, x in -2.0f64..2.0, shape in 0.5f64..4.0, scale in 0.3f64..3.0) {
        let m = OracleModel::new(shape, scale, Link::AbsLinear { coefs: vec![-0.3] }).unwrap();
        let t = m.invert_survival(q, &[x], 1e6);
        prop_assert!(t.is_finite());
        prop_assert!((m.survival(t, &[x]) - q).abs() <= 1e-6);
    }
}

fn weibull_sample(seed: u64, n: usize) -> Dataset {
    simulate(&Scenario::LinearLink.config(n, seed)).unwrap().dataset
}

#[test]
fn weibull_gradient_matches_central_differences() {
    let data = weibull_sample(11, 300);
    let lik = WeibullPhLikelihood::new(&data, FeatureMap::Identity);
    let mut rng = stream_rng(5, "test", 0);
    for _ in 0..20 {
        let theta = vec![uniform(&mut rng, -0.5, 0.5), uniform(&mut rng, -0.3, 1.0), uniform(&mut rng, -1.0, 1.5)];
        let mut grad = vec![0.0; 3];
        lik.value_grad(&theta, &mut grad);
        for k in 0..3 {
            let h = 1e-6 * theta[k].abs().max(1.0);
            let mut up = theta.clone();
            let mut down = theta.clone();
            up[k] += h;
            down[k] -= h;
            let fd = (lik.value(&up) - lik.value(&down)) / (2.0 * h);
            let rel = (grad[k] - fd).abs() / grad[k].abs().max(1.0);
            assert!(rel <= 1e-5, "theta {theta:?} component {k}: analytic {} vs fd {fd}", grad[k]);
        }
    }
}

#[test]
fn weibull_recovers_generating_parameters() {
    let data = weibull_sample(2024, 5000);
    let fit = weibull_ph_fit(&data, &WeibullOptions::default()).unwrap();
    assert!(fit.converged);
    assert!(fit.grad_norm < 1e-6);
    let lik = WeibullPhLikelihood::new(&data, FeatureMap::Identity);
    let theta = fit.theta();
    let se = lik.standard_errors(&theta).expect("information is invertible");
    let truth = [0.0, 2f64.ln(), 1.0];
    for k in 0..3 {
        let z = (theta[k] - truth[k]) / se[k];
        assert!(z.abs() <= 3.0, "parameter {k}: estimate {} truth {} se {}", theta[k], truth[k], se[k]);
    }
}
