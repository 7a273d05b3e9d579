//! Single-copy baseline: estimate `w` from Z⊗Z statistics of one Werner pair.
//!
//! The diagonal of a Werner state gives `p00 = p11 = (2 - w)/4` and
//! `p01 = p10 = w/4`, so `w = 2 - 4·p00`. Pairs are measured as soon as they
//! are generated, so no idle noise enters here.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{check_range, Error, Result};
use crate::protocol::{Inversion, OutcomeCounts, OutcomeDistribution};
use crate::qcore::WernerParam;

/// Z⊗Z statistics of a single Werner pair. Same layout as the distillation
/// outcome distribution.
pub type TomoOutcomeDistribution = OutcomeDistribution;
pub type TomoOutcomeCounts = OutcomeCounts;

/// `p00 = (2 - w)/4`.
pub fn tomo_p00_from_w(w: WernerParam) -> f64 {
    (2.0 - w.value()) / 4.0
}

pub fn tomo_distribution(w: WernerParam) -> TomoOutcomeDistribution {
    let p00 = tomo_p00_from_w(w);
    let p01 = w.value() / 4.0;
    OutcomeDistribution {
        p00,
        p01,
        p10: p01,
        p11: p00,
    }
}

/// `w = 2 - 4·p00`, clamping `p00` into `[1/4, 1/2]` first.
pub fn tomo_w_from_p00(p00: f64) -> Result<Inversion> {
    check_range("p00", p00, 0.0, 1.0, "[0, 1]")?;
    let clamped_p = p00.clamp(0.25, 0.5);
    Ok(Inversion {
        w: WernerParam::new((2.0 - 4.0 * clamped_p).clamp(0.0, 1.0))?,
        clamped: clamped_p != p00,
    })
}

/// `n` independent single-copy Z⊗Z measurements, reproducible from `seed`.
pub fn sample_tomo_outcomes(w: WernerParam, n: u64, seed: u64) -> Result<TomoOutcomeCounts> {
    if n == 0 {
        return Err(Error::Count {
            name: "n",
            value: n,
            min: 1,
        });
    }
    let dist = tomo_distribution(w);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = OutcomeCounts::default();
    for _ in 0..n {
        counts.record(dist.sample_index(&mut rng));
    }
    Ok(counts)
}
