// One simulated estimation run: sample N rounds, estimate w and report
// the confidence the sample supports.

use werner_distill::experiment::{run_algorithm1, NoiseSchedule};
use werner_distill::format::to_json_string;
use werner_distill::WernerParam;

pub fn run_example() -> werner_distill::Result<()> {
    let w = WernerParam::new(0.3)?;
    let r = run_algorithm1(50_000, 0.05, w, &NoiseSchedule::Noiseless, 42)?;
    print!("{}", to_json_string(&r)?);
    println!("|w_hat - w| = {:.4}, delta = {:.3e}", (r.w_hat - w.value()).abs(), r.delta);
    Ok(())
}

#[allow(dead_code)]
fn main() -> werner_distill::Result<()> {
    run_example()
}
