use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use werner_distill::bounds::{min_samples, noisy_distill_failure_bound, BoundSpec, Method, SampleCount};
use werner_distill::experiment::{
    derive_seed, empirical_failure_rate, estimate_from_outcomes, run_algorithm1, sample_trial, FailureRateReport,
    NoiseSchedule, RepetitionConfig, TrialOutcome,
};
use werner_distill::protocol::{NoisePairConfig, OutcomeCounts};
use werner_distill::tomography::{sample_tomo_outcomes, tomo_p00_from_w};
use werner_distill::WernerParam;

fn w(v: f64) -> WernerParam {
    WernerParam::new(v).unwrap()
}

fn transcript(n00: usize, total: usize) -> Vec<TrialOutcome> {
    let others = [TrialOutcome::from_index(1), TrialOutcome::from_index(2), TrialOutcome::from_index(3)];
    let sorted: Vec<TrialOutcome> = (0..total)
        .map(|i| if i < n00 { TrialOutcome::PLUS_PLUS } else { others[i % 3] })
        .collect();
    // 7 is coprime to 20, so this is a permutation that scatters the 00s
    (0..total).map(|i| sorted[(i * 7) % total]).collect()
}

#[test]
fn transcript_eight_of_twenty() {
    let r = estimate_from_outcomes(&transcript(8, 20), 0.1).unwrap();
    // hand evaluation, line by line
    let p_hat = 8.0 / 20.0;
    let w_hat = 1.0 - (4.0f64 * p_hat - 1.0).sqrt();
    let (w_p, w_m) = (w_hat + 0.1, w_hat - 0.1);
    let p_p = (2.0 - 2.0 * w_p + w_p * w_p) / 4.0;
    let p_m = (2.0 - 2.0 * w_m + w_m * w_m) / 4.0;
    let eps = (p_hat - p_p).abs().max((p_hat - p_m).abs());
    let delta = 2.0 * (-2.0 * 20.0 * eps * eps).exp();

    assert_eq!(r.n_count, 8);
    assert_eq!(r.n, 20);
    assert_eq!(r.p00_hat, 0.4);
    assert!((r.w_hat - w_hat).abs() < 1e-15);
    assert!((r.w_hat - 0.225_403_330_758_516_6).abs() < 1e-15);
    assert!((r.w_p - w_p).abs() < 1e-15 && (r.w_m - w_m).abs() < 1e-15);
    assert!((r.p00_p - p_p).abs() < 1e-15 && (r.p00_m - p_m).abs() < 1e-15);
    assert!((r.p00_p - 0.363_770_166_537_925_8).abs() < 1e-15);
    assert!((r.p00_m - 0.441_229_833_462_074_2).abs() < 1e-15);
    // max, not min or mean: the w_m side is the larger gap here
    assert!((r.eps - (p_hat - p_m).abs()).abs() < 1e-15);
    assert!((r.eps - 0.041_229_833_462_074_15).abs() < 1e-15);
    assert!((delta - 1.868_528_483_489_334_5).abs() < 1e-12);
    assert_eq!(r.delta, delta.min(1.0));
    assert!(!r.clamped && !r.window_clamped);
}

#[test]
fn transcript_thirteen_of_twenty_clamps() {
    let r = estimate_from_outcomes(&transcript(13, 20), 0.1).unwrap();
    assert_eq!(r.p00_hat, 0.65);
    assert!(r.clamped);
    assert_eq!(r.w_hat, 0.0);
    assert!(r.window_clamped);
    assert_eq!((r.w_p, r.w_m), (0.1, 0.0));
    assert!((r.p00_p - 0.4525).abs() < 1e-15);
    assert_eq!(r.p00_m, 0.5);
    assert!((r.eps - 0.1975).abs() < 1e-15);
    assert!((r.delta - 2.0 * (-40.0f64 * 0.1975 * 0.1975).exp()).abs() < 1e-15);
}

#[test]
fn larger_transcript_gives_informative_delta() {
    let counts = OutcomeCounts { n00: 34_000, n01: 16_000, n10: 16_000, n11: 34_000 };
    let r = werner_distill::experiment::estimate_from_counts(counts, 0.05, 1.0, 0).unwrap();
    assert!((r.w_hat - 0.4).abs() < 1e-12);
    assert!(r.delta < 0.01);
}

fn within_five_sigma(count: u64, n: u64, p: f64) -> bool {
    let freq = count as f64 / n as f64;
    (freq - p).abs() < 5.0 * (p * (1.0 - p) / n as f64).sqrt()
}

#[test]
fn fully_mixed_trials_are_uniform() {
    let cfg = NoisePairConfig::noiseless(w(1.0));
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut counts = OutcomeCounts::default();
    let n = 1_000_000;
    for _ in 0..n {
        counts.record(sample_trial(&cfg, &mut rng).index());
    }
    for c in counts.as_array() {
        assert!(within_five_sigma(c, n, 0.25));
    }
}

#[test]
fn tomography_frequencies_converge() {
    let n = 1_000_000;
    for (i, wv) in [0.0, 0.3, 0.6, 1.0].into_iter().enumerate() {
        let counts = sample_tomo_outcomes(w(wv), n, 100 + i as u64).unwrap();
        assert!(within_five_sigma(counts.n00, n, tomo_p00_from_w(w(wv))), "w={wv}");
        if wv == 1.0 {
            for c in counts.as_array() {
                assert!(within_five_sigma(c, n, 0.25));
            }
        }
    }
}

#[test]
fn run_is_deterministic_across_thread_counts() {
    let schedule = NoiseSchedule::FixedX { x: 0.15 };
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_algorithm1(100_000, 0.05, w(0.4), &schedule, 7).unwrap())
    };
    let a = run(1);
    assert_eq!(a, run(3));
    assert_eq!(a, run(8));
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&run_algorithm1(100_000, 0.05, w(0.4), &schedule, 7).unwrap()).unwrap()
    );
    assert_ne!(a, run_algorithm1(100_000, 0.05, w(0.4), &schedule, 8).unwrap());
}

#[test]
fn constant_idle_reports_realized_attenuation() {
    let schedule = NoiseSchedule::ConstantIdle { t: 0.2, coherence_time: 1.0 };
    let r = run_algorithm1(10_000, 0.1, w(0.3), &schedule, 1).unwrap();
    assert!((r.realized_s - (-0.2f64).exp()).abs() < 1e-12);
}

#[test]
fn per_trial_attenuation_is_exact_mean() {
    let times: Vec<f64> = (0..5000).map(|i| 0.05 * (i % 7) as f64).collect();
    let expected = times.iter().map(|t| (-t / 2.0f64).exp()).sum::<f64>() / times.len() as f64;
    let schedule = NoiseSchedule::IdleTimes { times, coherence_time: 2.0 };
    let r = run_algorithm1(5000, 0.1, w(0.3), &schedule, 1).unwrap();
    assert!((r.realized_s - expected).abs() < 1e-12);
}

#[test]
fn perfect_pairs_never_fail() {
    let cfg = RepetitionConfig {
        true_w: w(0.0),
        schedule: NoiseSchedule::Noiseless,
        n: 5000,
        eps_w: 0.05,
        master_seed: 3,
    };
    let report = empirical_failure_rate(&cfg, 200).unwrap();
    assert_eq!(report.failures, 0);
    assert_eq!(report.rate, 0.0);
}

#[test]
fn rep_order_does_not_matter() {
    let cfg = RepetitionConfig {
        true_w: w(0.4),
        schedule: NoiseSchedule::Noiseless,
        n: 2000,
        eps_w: 0.05,
        master_seed: 99,
    };
    let forward = empirical_failure_rate(&cfg, 60).unwrap();
    let mut order: Vec<u64> = (0..60).collect();
    order.reverse();
    order.swap(3, 40);
    let mut shuffled: Vec<_> = order.iter().map(|&r| cfg.run_rep(r).unwrap()).collect();
    let permuted = FailureRateReport::from_records(shuffled.clone());
    assert_eq!(permuted.rate, forward.rate);
    shuffled.sort_by_key(|r| r.rep);
    assert_eq!(shuffled, forward.records);
    assert_eq!(forward.records[5].seed, derive_seed(99, 5));
}

#[test]
fn noisy_failure_rates_respect_bound() {
    let x = 0.2;
    let s = 1.0 - x;
    for &(wv, eps) in &[(0.2, 0.1), (0.4, 0.1)] {
        let SampleCount::Samples(n) = min_samples(Method::NoisyDistillation, eps, 0.1, w(wv), s).unwrap() else {
            panic!("reachable");
        };
        let cfg = RepetitionConfig {
            true_w: w(wv),
            schedule: NoiseSchedule::FixedX { x },
            n,
            eps_w: eps,
            master_seed: 11,
        };
        let reps = 600;
        let report = empirical_failure_rate(&cfg, reps).unwrap();
        let bound = noisy_distill_failure_bound(&BoundSpec::new(n, eps, w(wv), s).unwrap()).unwrap().value;
        let slack = 3.0 * (bound * (1.0 - bound) / reps as f64).sqrt();
        assert!(report.rate <= bound + slack, "w={wv} rate={} bound={bound}", report.rate);
    }
}

#[test]
fn harness_rejects_zero_reps() {
    let cfg = RepetitionConfig {
        true_w: w(0.4),
        schedule: NoiseSchedule::Noiseless,
        n: 10,
        eps_w: 0.05,
        master_seed: 0,
    };
    assert!(empirical_failure_rate(&cfg, 0).is_err());
}
