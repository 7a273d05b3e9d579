//! Closed-form statistics of one distillation round on Werner pairs.
//!
//! Two pairs are shared, the control pair and the target pair. Both parties
//! apply a CNOT from their control qubit to their target qubit, measure the
//! target qubits in the Z basis and keep the control pair when the outcomes
//! agree. For Werner inputs with Φ⁺ weights `λc = 1 - w_c` and `λt = 1 - w_t`
//! the target outcomes are distributed as
//!
//! ```text
//! p00 = p11 = (1 + λc·λt) / 4
//! p01 = p10 = (1 - λc·λt) / 4
//! ```
//!
//! which for two identical copies gives `p00 = (2 - 2w + w²)/4`. The dense
//! engine in [`crate::qcore`] reproduces all of these to rounding error.

use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::qcore::{DepolarizingParam, WernerParam};

/// Probabilities of the four Z⊗Z outcomes (Alice's bit first, `0` ↔ Z = +1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    pub p00: f64,
    pub p01: f64,
    pub p10: f64,
    pub p11: f64,
}

impl OutcomeDistribution {
    /// Checks that each entry is in `[0, 1]` and that they sum to one within
    /// `1e-12`.
    pub fn new(p00: f64, p01: f64, p10: f64, p11: f64) -> Result<Self> {
        for (name, p) in [("p00", p00), ("p01", p01), ("p10", p10), ("p11", p11)] {
            check_range(name, p, 0.0, 1.0, "[0, 1]")?;
        }
        let d = OutcomeDistribution { p00, p01, p10, p11 };
        let total = d.total();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Domain {
                name: "sum of outcome probabilities",
                value: total,
                range: "1 ± 1e-12",
            });
        }
        Ok(d)
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.p00, self.p01, self.p10, self.p11]
    }

    pub fn total(&self) -> f64 {
        self.p00 + self.p01 + self.p10 + self.p11
    }

    /// Probability of a correlated outcome, i.e. of keeping the control pair.
    pub fn correlated(&self) -> f64 {
        self.p00 + self.p11
    }

    /// Largest entrywise difference to another distribution.
    pub fn max_abs_diff(&self, other: &OutcomeDistribution) -> f64 {
        self.as_array()
            .iter()
            .zip(other.as_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl OutcomeDistribution {
    /// Draws an outcome index (`0 = 00, 1 = 01, 2 = 10, 3 = 11`) by inverse
    /// CDF on one uniform draw. Zero-probability outcomes are never returned.
    pub fn sample_index<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let probs = self.as_array();
        let mut acc = 0.0;
        let mut last_positive = 0;
        for (k, &p) in probs.iter().enumerate() {
            if p <= 0.0 {
                continue;
            }
            acc += p;
            last_positive = k;
            if u < acc {
                return k;
            }
        }
        last_positive
    }
}

/// Tallies of the four Z⊗Z outcomes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeCounts {
    pub n00: u64,
    pub n01: u64,
    pub n10: u64,
    pub n11: u64,
}

impl OutcomeCounts {
    pub fn record(&mut self, index: usize) {
        match index {
            0 => self.n00 += 1,
            1 => self.n01 += 1,
            2 => self.n10 += 1,
            _ => self.n11 += 1,
        }
    }

    pub fn as_array(&self) -> [u64; 4] {
        [self.n00, self.n01, self.n10, self.n11]
    }

    pub fn total(&self) -> u64 {
        self.n00 + self.n01 + self.n10 + self.n11
    }

    /// Empirical frequency of `00`.
    pub fn p00_hat(&self) -> f64 {
        self.n00 as f64 / self.total() as f64
    }
}

impl std::ops::Add for OutcomeCounts {
    type Output = OutcomeCounts;

    fn add(self, rhs: OutcomeCounts) -> OutcomeCounts {
        OutcomeCounts {
            n00: self.n00 + rhs.n00,
            n01: self.n01 + rhs.n01,
            n10: self.n10 + rhs.n10,
            n11: self.n11 + rhs.n11,
        }
    }
}

/// A distillation round where the control copy idled under depolarizing
/// noise `x` before the fresh target copy was generated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoisePairConfig {
    pub w: WernerParam,
    pub x: DepolarizingParam,
}

impl NoisePairConfig {
    pub fn noiseless(w: WernerParam) -> Self {
        NoisePairConfig {
            w,
            x: DepolarizingParam::NONE,
        }
    }

    pub fn new(w: f64, x: f64) -> Result<Self> {
        Ok(NoisePairConfig {
            w: WernerParam::new(w)?,
            x: DepolarizingParam::new(x)?,
        })
    }
}

/// Result of inverting an observed probability back to a Werner parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inversion {
    pub w: WernerParam,
    /// The probability was outside the physical range and got clamped.
    pub clamped: bool,
}

/// `p00 = (2 - 2w + w²)/4` for two identical noiseless copies.
pub fn p00_from_w(w: WernerParam) -> f64 {
    let w = w.value();
    (2.0 - 2.0 * w + w * w) / 4.0
}

/// `p00` when the control copy's Φ⁺ weight is attenuated by `s = 1 - x`:
/// `(1 + s(1 - w)²)/4`. Evaluates exactly [`p00_from_w`] at `s = 1`.
pub fn p00_attenuated(w: WernerParam, s: f64) -> f64 {
    if s == 1.0 {
        return p00_from_w(w);
    }
    let lambda = w.singlet_weight();
    (1.0 + s * lambda * lambda) / 4.0
}

/// `w = 1 - √(4·p00 - 1)`.
///
/// `p00` outside `[0, 1]` is an error. Inside `[0, 1]` but outside the
/// physical range `[1/4, 1/2]` it is clamped to the nearest endpoint and the
/// result is flagged.
pub fn w_from_p00(p00: f64) -> Result<Inversion> {
    w_from_p00_attenuated(p00, 1.0)
}

/// Inverse of [`p00_attenuated`]: `w = 1 - √((4·p00 - 1)/s)`, clamping `p00`
/// into `[1/4, (1 + s)/4]`.
pub fn w_from_p00_attenuated(p00: f64, s: f64) -> Result<Inversion> {
    check_range("p00", p00, 0.0, 1.0, "[0, 1]")?;
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::Domain {
            name: "S",
            value: s,
            range: "(0, 1]",
        });
    }
    let hi = (1.0 + s) / 4.0;
    let clamped_p = p00.clamp(0.25, hi);
    let clamped = clamped_p != p00;
    let radicand = 4.0 * clamped_p - 1.0;
    let lambda = if s == 1.0 { radicand.sqrt() } else { (radicand / s).sqrt() };
    Ok(Inversion {
        w: WernerParam::new((1.0 - lambda).clamp(0.0, 1.0))?,
        clamped,
    })
}

/// Outcome distribution for a control pair with Φ⁺ weight `control_weight`
/// and a target pair with weight `target_weight`, both of Werner form.
pub fn werner_pair_distribution(control_weight: f64, target_weight: f64) -> OutcomeDistribution {
    let product = control_weight * target_weight;
    let same = (1.0 + product) / 4.0;
    let diff = (1.0 - product) / 4.0;
    OutcomeDistribution {
        p00: same,
        p01: diff,
        p10: diff,
        p11: same,
    }
}

/// Outcome distribution of one round where the control copy is
/// `depolarize(werner(w), x)` and the target copy is `werner(w)`.
pub fn outcome_distribution(cfg: &NoisePairConfig) -> OutcomeDistribution {
    if cfg.x.value() == 0.0 {
        let p00 = p00_from_w(cfg.w);
        let diff = 0.5 - p00;
        return OutcomeDistribution {
            p00,
            p01: diff,
            p10: diff,
            p11: p00,
        };
    }
    let lambda = cfg.w.singlet_weight();
    werner_pair_distribution(cfg.x.survival() * lambda, lambda)
}

/// Probability that the round keeps the control pair.
pub fn success_probability(cfg: &NoisePairConfig) -> f64 {
    outcome_distribution(cfg).correlated()
}

/// Fidelity of the kept pair after one round on two Werner pairs of
/// fidelity `F`:
///
/// ```text
/// F' = (F² + (1-F)²/9) / (F² + 2F(1-F)/3 + 5(1-F)²/9)
/// ```
pub fn fidelity_after_distillation(fidelity: f64) -> Result<f64> {
    let f = check_range("F", fidelity, 0.25, 1.0, "[1/4, 1]")?;
    let g = 1.0 - f;
    let num = f * f + g * g / 9.0;
    let den = f * f + 2.0 * f * g / 3.0 + 5.0 * g * g / 9.0;
    Ok(num / den)
}

/// Φ⁺ fidelity of the kept pair for a noisy round.
///
/// Writing each Werner pair in the Bell basis as `A` on Φ⁺ and `X` on each
/// of the other three Bell states, the kept pair has fidelity
/// `(A_c·A_t + X_c·X_t) / ((A_c + X_c)(A_t + X_t) + 4·X_c·X_t)`. With
/// `x = 0` this is [`fidelity_after_distillation`] of `1 - 3w/4`.
pub fn kept_fidelity(cfg: &NoisePairConfig) -> f64 {
    if cfg.x.value() == 0.0 {
        // F is always in range here
        return fidelity_after_distillation(cfg.w.fidelity()).unwrap_or(f64::NAN);
    }
    let bell = |lambda: f64| ((1.0 + 3.0 * lambda) / 4.0, (1.0 - lambda) / 4.0);
    let lambda = cfg.w.singlet_weight();
    let (ac, xc) = bell(cfg.x.survival() * lambda);
    let (at, xt) = bell(lambda);
    (ac * at + xc * xt) / ((ac + xc) * (at + xt) + 4.0 * xc * xt)
}

pub fn fidelity_from_w(w: WernerParam) -> f64 {
    w.fidelity()
}

pub fn w_from_fidelity(fidelity: f64) -> Result<WernerParam> {
    WernerParam::from_fidelity(fidelity)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn w(v: f64) -> WernerParam {
        WernerParam::new(v).unwrap()
    }

    #[test]
    fn p00_reference_values() {
        assert_eq!(p00_from_w(w(0.0)), 0.5);
        assert_eq!(p00_from_w(w(1.0)), 0.25);
        assert_abs_diff_eq!(p00_from_w(w(0.4)), 0.34, epsilon = 1e-15);
    }

    #[test]
    fn p00_strictly_decreasing() {
        let values: Vec<f64> = (0..=1000).map(|i| p00_from_w(w(i as f64 / 1000.0))).collect();
        assert!(values.windows(2).all(|pair| pair[1] < pair[0]));
    }

    #[test]
    fn inversion_endpoints_and_round_trip() {
        assert_eq!(w_from_p00(0.5).unwrap().w.value(), 0.0);
        assert_eq!(w_from_p00(0.25).unwrap().w.value(), 1.0);
        let inv = w_from_p00(0.34).unwrap();
        assert!(!inv.clamped);
        assert_abs_diff_eq!(inv.w.value(), 0.4, epsilon = 1e-12);
    }

    #[test]
    fn inversion_clamps_unphysical_probabilities() {
        let hi = w_from_p00(0.65).unwrap();
        assert!(hi.clamped);
        assert_eq!(hi.w.value(), 0.0);
        let lo = w_from_p00(0.1).unwrap();
        assert!(lo.clamped);
        assert_eq!(lo.w.value(), 1.0);
        assert!(w_from_p00(1.2).is_err());
        assert!(w_from_p00(-0.1).is_err());
        assert!(w_from_p00(f64::NAN).is_err());
    }

    #[test]
    fn attenuated_inversion_round_trips() {
        for &s in &[1.0, 0.9, (-0.2f64).exp(), 0.3] {
            for i in 0..=20 {
                let wv = w(i as f64 / 20.0);
                let inv = w_from_p00_attenuated(p00_attenuated(wv, s), s).unwrap();
                assert_abs_diff_eq!(inv.w.value(), wv.value(), epsilon = 1e-7);
            }
        }
        assert!(w_from_p00_attenuated(0.3, 0.0).is_err());
        assert!(w_from_p00_attenuated(0.3, 1.5).is_err());
    }

    #[test]
    fn outcome_distribution_reference_points() {
        let d = outcome_distribution(&NoisePairConfig::new(0.4, 0.0).unwrap());
        assert_abs_diff_eq!(d.p00, 0.34, epsilon = 1e-15);
        assert_abs_diff_eq!(d.total(), 1.0, epsilon = 1e-15);
        let d = outcome_distribution(&NoisePairConfig::new(0.0, 1.0).unwrap());
        assert_abs_diff_eq!(d.p00, 0.25, epsilon = 1e-15);
        let d = outcome_distribution(&NoisePairConfig::new(0.37, 0.21).unwrap());
        assert_eq!(d.p00, d.p11);
        assert_eq!(d.p01, d.p10);
    }

    #[test]
    fn success_probability_reference_points() {
        assert_eq!(success_probability(&NoisePairConfig::new(0.0, 0.0).unwrap()), 1.0);
        assert_eq!(success_probability(&NoisePairConfig::new(1.0, 0.0).unwrap()), 0.5);
        assert_abs_diff_eq!(
            success_probability(&NoisePairConfig::new(0.4, 0.0).unwrap()),
            0.68,
            epsilon = 1e-15
        );
    }

    #[test]
    fn fidelity_map_fixed_points_and_gain() {
        assert_abs_diff_eq!(fidelity_after_distillation(1.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(fidelity_after_distillation(0.5).unwrap(), 0.5, epsilon = 1e-15);
        // 0.569444.../0.722222... = 41/52
        assert_abs_diff_eq!(fidelity_after_distillation(0.75).unwrap(), 41.0 / 52.0, epsilon = 1e-15);
        for i in 1..100 {
            let f = 0.5 + 0.5 * i as f64 / 100.0;
            assert!(fidelity_after_distillation(f).unwrap() > f);
            let f = 0.25 + 0.25 * i as f64 / 100.0;
            assert!(fidelity_after_distillation(f).unwrap() < f);
        }
        assert!(fidelity_after_distillation(0.2).is_err());
        assert!(fidelity_after_distillation(1.01).is_err());
    }

    #[test]
    fn fidelity_affine_map() {
        assert_eq!(fidelity_from_w(w(0.0)), 1.0);
        assert_eq!(w_from_fidelity(0.25).unwrap().value(), 1.0);
        assert_abs_diff_eq!(fidelity_from_w(w(2.0 / 3.0)), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn distribution_validation() {
        assert!(OutcomeDistribution::new(0.25, 0.25, 0.25, 0.25).is_ok());
        assert!(OutcomeDistribution::new(0.5, 0.25, 0.25, 0.25).is_err());
        assert!(OutcomeDistribution::new(1.1, -0.1, 0.0, 0.0).is_err());
    }
}
