// The control pair idles for t while the target is generated; the
// estimator corrects for the known attenuation S = exp(-t/T).

use werner_distill::experiment::{run_algorithm1, NoiseSchedule};
use werner_distill::protocol::{outcome_distribution, NoisePairConfig};
use werner_distill::qcore::DepolarizingParam;
use werner_distill::WernerParam;

pub fn run_example() -> werner_distill::Result<()> {
    let (t, coherence_time) = (0.2, 1.0);
    let x = DepolarizingParam::from_idle(t, coherence_time)?;
    let w = WernerParam::new(0.25)?;
    let d = outcome_distribution(&NoisePairConfig { w, x });
    println!("x = {:.6}, S = {:.6}, p00 = {:.6}", x.value(), x.survival(), d.p00);

    let r = run_algorithm1(200_000, 0.05, w, &NoiseSchedule::ConstantIdle { t, coherence_time }, 9)?;
    println!("realized S = {:.6}, w_hat = {:.4}, delta = {:.3e}", r.realized_s, r.w_hat, r.delta);
    Ok(())
}

#[allow(dead_code)]
fn main() -> werner_distill::Result<()> {
    run_example()
}
