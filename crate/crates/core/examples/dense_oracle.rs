// Builds the two-pair state explicitly, applies the bilateral CNOT and
// measures the target pair, then compares with the closed forms.

use werner_distill::protocol::{kept_fidelity, outcome_distribution, NoisePairConfig};
use werner_distill::qcore::{depolarize, distillation_round, werner_state};

pub fn run_example() -> werner_distill::Result<()> {
    let cfg = NoisePairConfig::new(0.3, 0.25)?;
    let control = depolarize(&werner_state(cfg.w), cfg.x)?;
    let m = distillation_round(&control, &werner_state(cfg.w))?;
    let analytic = outcome_distribution(&cfg);

    println!("dense    {:?}", m.distribution.as_array());
    println!("analytic {:?}", analytic.as_array());
    let gap = m.distribution.max_abs_diff(&analytic);
    println!("max |dense - analytic| = {gap:.2e}");
    assert!(gap < 1e-12);

    let kept = m.kept_state().expect("nonzero success probability");
    let f = kept.phi_plus_fidelity()?;
    println!("kept-pair fidelity {f:.12} (closed form {:.12})", kept_fidelity(&cfg));
    assert!((f - kept_fidelity(&cfg)).abs() < 1e-12);
    Ok(())
}

#[allow(dead_code)]
fn main() -> werner_distill::Result<()> {
    run_example()
}
