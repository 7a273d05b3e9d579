// Minimum sample counts guaranteeing accuracy eps' with confidence 1 - delta.

use werner_distill::bounds::{crossover_w, default_attenuation, min_samples, Method};
use werner_distill::WernerParam;

pub fn run_example() -> werner_distill::Result<()> {
    let (eps, delta) = (0.1, 0.01);
    let s = default_attenuation();
    println!("eps' = {eps}, delta = {delta}, crossover at w = {}", crossover_w(eps)?.value());
    for wv in [0.0, 0.2, 0.45, 0.6, 0.9] {
        let w = WernerParam::new(wv)?;
        println!(
            "w = {wv:<4}  distillation {:>12}  tomography {:>6}  idle-noisy {:>12}",
            min_samples(Method::Distillation, eps, delta, w, 1.0)?,
            min_samples(Method::Tomography, eps, delta, w, 1.0)?,
            min_samples(Method::NoisyDistillation, eps, delta, w, s)?,
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> werner_distill::Result<()> {
    run_example()
}
