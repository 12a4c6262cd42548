use frictionnet::bn::{Distribution, Scale};
use frictionnet::metrics::{camera_scores_to_marginals, hellinger, wasserstein1, MetricKind};
use proptest::prelude::*;

fn weights(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![1 => Just(0.0), 4 => 0.0..1.0f64], n)
        .prop_filter("needs some mass", |w| w.iter().sum::<f64>() > 1e-6)
}

fn triple() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>)> {
    (2usize..=8).prop_flat_map(|n| (weights(n), weights(n), weights(n)))
}

fn dist(scale: Scale, w: &[f64]) -> Distribution {
    Distribution::from_weights("X", scale, w.to_vec()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn both_metrics_are_metrics((a, b, c) in triple()) {
        for kind in [MetricKind::Wasserstein1, MetricKind::Hellinger] {
            let scale = if kind == MetricKind::Wasserstein1 { Scale::Ordinal } else { Scale::Nominal };
            let (p, q, r) = (dist(scale, &a), dist(scale, &b), dist(scale, &c));
            let d = |x: &Distribution, y: &Distribution| kind.distance(x, y).unwrap();
            prop_assert!(d(&p, &p).abs() < 1e-12);
            prop_assert_eq!(d(&p, &q), d(&q, &p));
            prop_assert!(d(&p, &q) >= 0.0);
            prop_assert!(d(&p, &r) <= d(&p, &q) + d(&q, &r) + 1e-12);
            if kind == MetricKind::Hellinger {
                prop_assert!(d(&p, &q) <= 1.0);
            }
        }
    }

    #[test]
    fn camera_marginals_keep_unit_mass(w in weights(7)) {
        let total: f64 = w.iter().sum();
        let mut scores = [0.0; 7];
        for (s, x) in scores.iter_mut().zip(&w) {
            *s = x / total;
        }
        let m = camera_scores_to_marginals(&scores).unwrap();
        prop_assert!((m.pavement.probabilities().iter().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert!((m.weather.probabilities().iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn wasserstein_between_point_masses_is_index_distance() {
    for n in 2..=16 {
        for i in 0..n {
            for j in 0..n {
                let p = Distribution::point_mass("X", Scale::Ordinal, n, i);
                let q = Distribution::point_mass("X", Scale::Ordinal, n, j);
                assert_eq!(wasserstein1(&p, &q).unwrap(), i.abs_diff(j) as f64);
            }
        }
    }
}

#[test]
fn hellinger_reference_values() {
    let p = Distribution::new("X", Scale::Nominal, vec![0.5, 0.5]).unwrap();
    let q = Distribution::point_mass("X", Scale::Nominal, 2, 0);
    let h = hellinger(&p, &q).unwrap();
    // sqrt(1 - sqrt(0.5))
    assert!((h - 0.5412).abs() < 1e-4, "{h}");
    let disjoint = Distribution::point_mass("X", Scale::Nominal, 2, 1);
    assert_eq!(hellinger(&q, &disjoint).unwrap(), 1.0);
}
