//! Seeded Monte Carlo execution of the distillation-based estimator.
//!
//! One run draws `N` distillation rounds, counts the `(+1, +1)` target
//! outcomes, inverts the frequency to `ŵ` and turns the requested precision
//! `ε_w` on `w` into a precision `ε` on `p00` and an a-posteriori failure
//! probability `δ = 2·exp(-2Nε²)`.
//!
//! # Determinism
//!
//! Trials are drawn in fixed blocks of [`BLOCK_TRIALS`]; block `k` of a run
//! with seed `s` uses its own ChaCha8 stream seeded with
//! [`derive_seed`]`(s, k)`. Block tallies are summed, so the result does not
//! depend on how many threads execute the blocks. Repetition `r` of a harness
//! with master seed `m` runs with seed `derive_seed(m, r)`.
//!
//! `δ` is computed from the realized `ε` after looking at the data, exactly
//! as the procedure prescribes. It is a diagnostic, not a pre-registered
//! confidence level.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::csv_float;
use crate::protocol::{
    outcome_distribution, p00_attenuated, w_from_p00_attenuated, NoisePairConfig, OutcomeCounts,
};
use crate::qcore::{DepolarizingParam, WernerParam};

/// Trials per independently seeded block.
pub const BLOCK_TRIALS: u64 = 1 << 14;

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of sub-stream `index` under `master`:
/// `splitmix64(master + splitmix64(index))` with wrapping addition.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(master.wrapping_add(splitmix64(index)))
}

/// Z eigenvalues read by Alice and Bob on their target qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub za: i8,
    pub zb: i8,
}

impl TrialOutcome {
    pub const PLUS_PLUS: TrialOutcome = TrialOutcome { za: 1, zb: 1 };

    /// From an outcome index `2a + b` with bit `0` ↔ eigenvalue `+1`.
    pub fn from_index(index: usize) -> Self {
        let sign = |bit: usize| if bit == 0 { 1 } else { -1 };
        TrialOutcome {
            za: sign((index >> 1) & 1),
            zb: sign(index & 1),
        }
    }

    pub fn index(self) -> usize {
        let bit = |z: i8| usize::from(z < 0);
        2 * bit(self.za) + bit(self.zb)
    }

    pub fn correlated(self) -> bool {
        self.za == self.zb
    }
}

/// Idle noise on the control copy of each round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum NoiseSchedule {
    Noiseless,
    /// Same depolarizing strength every round.
    FixedX { x: f64 },
    /// Same idle time every round: `x = 1 - exp(-t/T)`.
    ConstantIdle { t: f64, coherence_time: f64 },
    /// One idle time per round, in order; length must equal `N`.
    IdleTimes { times: Vec<f64>, coherence_time: f64 },
}

impl NoiseSchedule {
    fn constant(&self) -> Result<Option<DepolarizingParam>> {
        match self {
            NoiseSchedule::Noiseless => Ok(Some(DepolarizingParam::NONE)),
            NoiseSchedule::FixedX { x } => DepolarizingParam::new(*x).map(Some),
            NoiseSchedule::ConstantIdle { t, coherence_time } => {
                DepolarizingParam::from_idle(*t, *coherence_time).map(Some)
            }
            NoiseSchedule::IdleTimes { .. } => Ok(None),
        }
    }

    /// Per-round depolarizing strengths for `n` rounds.
    pub fn resolve(&self, n: u64) -> Result<ResolvedSchedule> {
        if let Some(x) = self.constant()? {
            return Ok(ResolvedSchedule::Constant(x));
        }
        let NoiseSchedule::IdleTimes { times, coherence_time } = self else {
            unreachable!("non-constant schedules carry idle times")
        };
        if times.len() as u64 != n {
            return Err(Error::Count { name: "idle times", value: times.len() as u64, min: n });
        }
        times
            .iter()
            .map(|&t| DepolarizingParam::from_idle(t, *coherence_time))
            .collect::<Result<Vec<_>>>()
            .map(ResolvedSchedule::PerTrial)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ResolvedSchedule {
    Constant(DepolarizingParam),
    PerTrial(Vec<DepolarizingParam>),
}

impl ResolvedSchedule {
    fn x(&self, trial: u64) -> DepolarizingParam {
        match self {
            ResolvedSchedule::Constant(x) => *x,
            ResolvedSchedule::PerTrial(xs) => xs[trial as usize],
        }
    }

    /// `S = (1/N)·Σ(1 - x_i)`.
    pub fn realized_attenuation(&self) -> f64 {
        match self {
            ResolvedSchedule::Constant(x) => x.survival(),
            ResolvedSchedule::PerTrial(xs) => {
                xs.iter().map(|x| x.survival()).sum::<f64>() / xs.len() as f64
            }
        }
    }
}

/// Draws one distillation round.
pub fn sample_trial<R: Rng + ?Sized>(cfg: &NoisePairConfig, rng: &mut R) -> TrialOutcome {
    TrialOutcome::from_index(outcome_distribution(cfg).sample_index(rng))
}

/// Everything the estimation procedure computes, plus provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    #[serde(rename = "N")]
    pub n: u64,
    pub n_count: u64,
    pub p00_hat: f64,
    pub w_hat: f64,
    pub eps_w: f64,
    pub w_p: f64,
    pub w_m: f64,
    pub p00_p: f64,
    pub p00_m: f64,
    pub eps: f64,
    pub delta: f64,
    #[serde(rename = "realized_S")]
    pub realized_s: f64,
    pub seed: u64,
    /// `p̂00` was outside the physical range and got clamped before inversion.
    pub clamped: bool,
    /// `ŵ ± ε_w` left `[0, 1]` and got clamped.
    pub window_clamped: bool,
    pub counts: OutcomeCounts,
}

impl ExperimentResult {
    pub const CSV_HEADER: &'static str = "N,n_count,p00_hat,w_hat,eps_w,w_p,w_m,p00_p,p00_m,eps,delta,realized_S,seed,clamped,window_clamped,n00,n01,n10,n11";

    pub fn csv_record(&self) -> String {
        [
            self.n.to_string(),
            self.n_count.to_string(),
            csv_float(self.p00_hat),
            csv_float(self.w_hat),
            csv_float(self.eps_w),
            csv_float(self.w_p),
            csv_float(self.w_m),
            csv_float(self.p00_p),
            csv_float(self.p00_m),
            csv_float(self.eps),
            csv_float(self.delta),
            csv_float(self.realized_s),
            self.seed.to_string(),
            self.clamped.to_string(),
            self.window_clamped.to_string(),
            self.counts.n00.to_string(),
            self.counts.n01.to_string(),
            self.counts.n10.to_string(),
            self.counts.n11.to_string(),
        ]
        .join(",")
    }
}

fn check_eps_w(eps_w: f64) -> Result<f64> {
    if eps_w.is_finite() && eps_w > 0.0 {
        Ok(eps_w)
    } else {
        Err(Error::Domain { name: "eps_w", value: eps_w, range: "(0, inf)" })
    }
}

/// Post-processing of the tallies: from `n_count/N` to `(ŵ, ε, δ)`.
///
/// `attenuation` is the realized `S`; at `S = 1` the arithmetic is exactly
/// `ŵ = 1 - √(4p̂ - 1)` and `p00(w) = (2 - 2w + w²)/4`.
pub fn estimate_from_counts(counts: OutcomeCounts, eps_w: f64, attenuation: f64, seed: u64) -> Result<ExperimentResult> {
    let n = counts.total();
    if n == 0 {
        return Err(Error::Count { name: "N", value: 0, min: 1 });
    }
    check_eps_w(eps_w)?;
    let n_count = counts.n00;
    let p00_hat = n_count as f64 / n as f64;
    let inv = w_from_p00_attenuated(p00_hat, attenuation)?;
    let w_hat = inv.w.value();

    let (w_p_raw, w_m_raw) = (w_hat + eps_w, w_hat - eps_w);
    let w_p = w_p_raw.clamp(0.0, 1.0);
    let w_m = w_m_raw.clamp(0.0, 1.0);
    let window_clamped = w_p != w_p_raw || w_m != w_m_raw;

    let p00_p = p00_attenuated(WernerParam::new(w_p)?, attenuation);
    let p00_m = p00_attenuated(WernerParam::new(w_m)?, attenuation);
    let eps = (p00_hat - p00_p).abs().max((p00_hat - p00_m).abs());
    let delta = (2.0 * (-2.0 * n as f64 * eps * eps).exp()).min(1.0);

    Ok(ExperimentResult {
        n,
        n_count,
        p00_hat,
        w_hat,
        eps_w,
        w_p,
        w_m,
        p00_p,
        p00_m,
        eps,
        delta,
        realized_s: attenuation,
        seed,
        clamped: inv.clamped,
        window_clamped,
        counts,
    })
}

/// Estimation from a recorded sequence of noiseless outcomes.
pub fn estimate_from_outcomes(outcomes: &[TrialOutcome], eps_w: f64) -> Result<ExperimentResult> {
    let mut counts = OutcomeCounts::default();
    for o in outcomes {
        counts.record(o.index());
    }
    estimate_from_counts(counts, eps_w, 1.0, 0)
}

fn sample_block(w: WernerParam, schedule: &ResolvedSchedule, seed: u64, block: u64, n: u64) -> OutcomeCounts {
    let start = block * BLOCK_TRIALS;
    let end = (start + BLOCK_TRIALS).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, block));
    let mut counts = OutcomeCounts::default();
    match schedule {
        ResolvedSchedule::Constant(x) => {
            let dist = outcome_distribution(&NoisePairConfig { w, x: *x });
            for _ in start..end {
                counts.record(dist.sample_index(&mut rng));
            }
        }
        ResolvedSchedule::PerTrial(_) => {
            for trial in start..end {
                let cfg = NoisePairConfig { w, x: schedule.x(trial) };
                counts.record(sample_trial(&cfg, &mut rng).index());
            }
        }
    }
    counts
}

/// Draws `n` rounds and tallies the outcomes.
pub fn sample_counts(w: WernerParam, schedule: &ResolvedSchedule, n: u64, seed: u64) -> OutcomeCounts {
    let blocks = n.div_ceil(BLOCK_TRIALS);
    (0..blocks)
        .into_par_iter()
        .map(|block| sample_block(w, schedule, seed, block, n))
        .reduce(OutcomeCounts::default, |a, b| a + b)
}

/// One complete estimation run on simulated data.
pub fn run_algorithm1(n: u64, eps_w: f64, w: WernerParam, schedule: &NoiseSchedule, seed: u64) -> Result<ExperimentResult> {
    if n == 0 {
        return Err(Error::Count { name: "N", value: 0, min: 1 });
    }
    check_eps_w(eps_w)?;
    let resolved = schedule.resolve(n)?;
    let counts = sample_counts(w, &resolved, n, seed);
    estimate_from_counts(counts, eps_w, resolved.realized_attenuation(), seed)
}

/// One repetition of the failure-rate harness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RepRecord {
    pub rep: u64,
    pub seed: u64,
    pub w_hat: f64,
    pub fail: bool,
}

impl RepRecord {
    pub const CSV_HEADER: &'static str = "rep,seed,w_hat,fail";

    pub fn csv_record(&self) -> String {
        format!("{},{},{},{}", self.rep, self.seed, csv_float(self.w_hat), u8::from(self.fail))
    }
}

/// Parameters of the failure-rate harness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepetitionConfig {
    pub true_w: WernerParam,
    pub schedule: NoiseSchedule,
    #[serde(rename = "N")]
    pub n: u64,
    pub eps_w: f64,
    pub master_seed: u64,
}

impl RepetitionConfig {
    /// Runs repetition `rep` with its derived seed.
    pub fn run_rep(&self, rep: u64) -> Result<RepRecord> {
        let seed = derive_seed(self.master_seed, rep);
        let result = run_algorithm1(self.n, self.eps_w, self.true_w, &self.schedule, seed)?;
        Ok(RepRecord {
            rep,
            seed,
            w_hat: result.w_hat,
            fail: (result.w_hat - self.true_w.value()).abs() >= self.eps_w,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureRateReport {
    pub reps: u64,
    pub failures: u64,
    pub rate: f64,
    /// Binomial standard error `√(rate(1 - rate)/reps)`.
    pub std_error: f64,
    pub records: Vec<RepRecord>,
}

impl FailureRateReport {
    pub fn from_records(records: Vec<RepRecord>) -> Self {
        let reps = records.len() as u64;
        let failures = records.iter().filter(|r| r.fail).count() as u64;
        let rate = failures as f64 / reps.max(1) as f64;
        FailureRateReport {
            reps,
            failures,
            rate,
            std_error: (rate * (1.0 - rate) / reps.max(1) as f64).sqrt(),
            records,
        }
    }
}

/// Fraction of `reps` independent runs with `|ŵ - w| ≥ ε_w`.
pub fn empirical_failure_rate(cfg: &RepetitionConfig, reps: u64) -> Result<FailureRateReport> {
    if reps == 0 {
        return Err(Error::Count { name: "reps", value: 0, min: 1 });
    }
    let records = (0..reps)
        .into_par_iter()
        .map(|rep| cfg.run_rep(rep))
        .collect::<Result<Vec<_>>>()?;
    Ok(FailureRateReport::from_records(records))
}
