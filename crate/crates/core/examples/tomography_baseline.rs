// Direct ZZ measurement of unpurified pairs, the baseline estimator.

use werner_distill::tomography::{sample_tomo_outcomes, tomo_distribution, tomo_w_from_p00};
use werner_distill::WernerParam;

pub fn run_example() -> werner_distill::Result<()> {
    let w = WernerParam::new(0.4)?;
    println!("exact {:?}", tomo_distribution(w).as_array());
    let counts = sample_tomo_outcomes(w, 100_000, 5)?;
    let est = tomo_w_from_p00(counts.p00_hat())?;
    println!("counts {:?} -> w_hat = {:.4}", counts.as_array(), est.w.value());
    Ok(())
}

#[allow(dead_code)]
fn main() -> werner_distill::Result<()> {
    run_example()
}
