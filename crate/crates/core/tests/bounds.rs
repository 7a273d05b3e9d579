use proptest::prelude::*;
use werner_distill::bounds::{
    crossover_w, default_attenuation, distill_failure_bound, failure_bound, figure1_curves, linear_grid,
    min_samples, noisy_distill_failure_bound, tomo_failure_bound, BoundSpec, Method, SampleCount,
};
use werner_distill::WernerParam;

fn w(v: f64) -> WernerParam {
    WernerParam::new(v).unwrap()
}

#[test]
fn distillation_beats_tomography_below_crossover() {
    for &eps in &[0.05, 0.1, 0.2] {
        let c = crossover_w(eps).unwrap().value();
        for i in 0..100 {
            let wv = i as f64 / 100.0;
            if (wv - c).abs() < 1e-9 {
                continue;
            }
            let d = distill_failure_bound(1000, eps, w(wv)).unwrap().value;
            let t = tomo_failure_bound(1000, eps).unwrap();
            if wv < c {
                assert!(d <= t, "eps={eps} w={wv}");
            } else {
                assert!(d >= t, "eps={eps} w={wv}");
            }
        }
    }
}

#[test]
fn attenuation_inflates_sample_count_by_inverse_square() {
    let s = default_attenuation();
    for i in 0..40 {
        let wv = i as f64 * 0.02;
        let SampleCount::Samples(base) = min_samples(Method::Distillation, 0.1, 0.01, w(wv), 1.0).unwrap() else {
            continue;
        };
        let SampleCount::Samples(noisy) = min_samples(Method::NoisyDistillation, 0.1, 0.01, w(wv), s).unwrap() else {
            panic!("noisy curve unreachable where noiseless is reachable");
        };
        let inflation = 1.0 / (s * s);
        assert!((inflation - (0.4f64).exp()).abs() < 1e-12);
        // ceil(K/S²) vs ceil(K)/S²: off by at most the two ceilings
        let lo = ((base - 1) as f64 * inflation).floor() as u64;
        let hi = (base as f64 * inflation).ceil() as u64 + 1;
        assert!(noisy >= lo && noisy <= hi, "w={wv} base={base} noisy={noisy}");
    }
}

#[test]
fn figure_curves_shapes() {
    let grid = linear_grid(0.0, 0.95, 0.01).unwrap();
    let fig = figure1_curves(0.1, 0.01, default_attenuation(), &grid).unwrap();
    let tomo: Vec<_> = fig.tomography.n_min.iter().collect();
    assert!(tomo.iter().all(|&&n| n == SampleCount::Samples(4239)));
    let reachable: Vec<u64> = fig.distillation.n_min.iter().filter_map(|n| n.samples()).collect();
    assert!(reachable.windows(2).all(|p| p[1] > p[0]));
    assert!(fig.distillation.n_min.last().unwrap().is_unreachable());
    assert_eq!(fig.distillation.n_min.len(), grid.len());
}

#[test]
fn figure_csv_round_trips() {
    let grid = linear_grid(0.0, 0.95, 0.05).unwrap();
    let fig = figure1_curves(0.1, 0.01, default_attenuation(), &grid).unwrap();
    let csv = fig.to_csv();
    assert!(csv.starts_with("w,n_distill,n_tomo,n_noisy,flags\n0,1175,4239,"));
    let rows = werner_distill::bounds::parse_figure1_csv(&csv).unwrap();
    assert_eq!(werner_distill::bounds::write_figure1_csv(&rows), csv);
    assert!(csv.contains("unreachable"));
}

#[test]
fn figure_json_round_trips() {
    let grid = linear_grid(0.0, 0.9, 0.1).unwrap();
    let fig = figure1_curves(0.1, 0.01, 0.8, &grid).unwrap();
    let json = serde_json::to_string(&fig).unwrap();
    let back: werner_distill::bounds::Figure1 = serde_json::from_str(&json).unwrap();
    assert_eq!(back, fig);
}

#[test]
fn vacuous_region_is_flagged_not_an_error() {
    let b = distill_failure_bound(10, 0.5, w(0.8)).unwrap();
    assert!(b.vacuous);
    let spec = BoundSpec::new(10, 0.5, w(0.8), 0.5).unwrap();
    assert!(noisy_distill_failure_bound(&spec).unwrap().vacuous);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn min_samples_is_exact_threshold(
        method in prop_oneof![Just(Method::Distillation), Just(Method::Tomography), Just(Method::NoisyDistillation)],
        eps in 0.01f64..0.5,
        delta in 0.001f64..0.5,
        wv in 0.0f64..1.0,
        s in 0.2f64..=1.0,
    ) {
        let wp = w(wv);
        if let SampleCount::Samples(n) = min_samples(method, eps, delta, wp, s).unwrap() {
            prop_assert!(failure_bound(method, n, eps, wp, s).unwrap().value <= delta);
            if n > 1 {
                prop_assert!(failure_bound(method, n - 1, eps, wp, s).unwrap().value > delta);
            }
        } else {
            prop_assert!(method != Method::Tomography);
        }
    }

    #[test]
    fn bounds_nonincreasing_in_n_and_capped(n in 1u64..100_000, eps in 0.01f64..0.5, wv in 0.0f64..=1.0, s in 0.1f64..=1.0) {
        for method in [Method::Distillation, Method::Tomography, Method::NoisyDistillation] {
            let a = failure_bound(method, n, eps, w(wv), s).unwrap().value;
            let b = failure_bound(method, n + 1, eps, w(wv), s).unwrap().value;
            prop_assert!(b <= a);
            prop_assert!((0.0..=1.0).contains(&a));
        }
    }

    #[test]
    fn tomography_invariant_under_n_eps_squared(n in 1u64..10_000, eps in 0.01f64..1.0) {
        let a = tomo_failure_bound(n, eps).unwrap();
        let b = tomo_failure_bound(4 * n, eps / 2.0).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1e-300));
    }
}
