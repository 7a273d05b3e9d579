// Closed-form outcome statistics of one distillation round.
//
// ```not_rust
// cargo run --example exact_statistics
// ```

use werner_distill::protocol::{kept_fidelity, outcome_distribution, success_probability, w_from_p00, NoisePairConfig};

pub fn run_example() -> werner_distill::Result<()> {
    println!("{:>5} {:>5} {:>10} {:>10} {:>10} {:>10}", "w", "x", "p00", "success", "F", "F'");
    for &(w, x) in &[(0.0, 0.0), (0.2, 0.0), (0.4, 0.0), (0.4, 0.2), (0.8, 0.5)] {
        let cfg = NoisePairConfig::new(w, x)?;
        let d = outcome_distribution(&cfg);
        println!(
            "{w:>5} {x:>5} {:>10.6} {:>10.6} {:>10.6} {:>10.6}",
            d.p00,
            success_probability(&cfg),
            cfg.w.fidelity(),
            kept_fidelity(&cfg)
        );
        if x == 0.0 {
            let back = w_from_p00(d.p00)?;
            assert!((back.w.value() - w).abs() < 1e-12);
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> werner_distill::Result<()> {
    run_example()
}
