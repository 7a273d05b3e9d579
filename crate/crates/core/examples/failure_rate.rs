// Repeats the estimator many times at the bound's own sample count and
// compares the empirical failure rate with the Hoeffding guarantee.

use werner_distill::bounds::{distill_failure_bound, min_samples, Method, SampleCount};
use werner_distill::experiment::{empirical_failure_rate, NoiseSchedule, RepetitionConfig};
use werner_distill::WernerParam;

pub fn run_example() -> werner_distill::Result<()> {
    let (eps, delta) = (0.1, 0.1);
    let w = WernerParam::new(0.3)?;
    let SampleCount::Samples(n) = min_samples(Method::Distillation, eps, delta, w, 1.0)? else {
        unreachable!("w = 0.3 is below the reachable limit");
    };
    let cfg = RepetitionConfig { true_w: w, schedule: NoiseSchedule::Noiseless, n, eps_w: eps, master_seed: 1 };
    let report = empirical_failure_rate(&cfg, 300)?;
    let bound = distill_failure_bound(n, eps, w)?.value;
    println!(
        "N = {n}: {} / {} failures, rate {:.4} (bound {bound:.4}, std error {:.4})",
        report.failures, report.reps, report.rate, report.std_error
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> werner_distill::Result<()> {
    run_example()
}
