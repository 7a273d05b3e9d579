//! Hoeffding tail bounds for the two estimators and their inversion to
//! minimum sample counts.
//!
//! Every bound here is one call into [`hoeffding_tail`] for `[0, 1]`-valued
//! indicator variables. What changes between estimators is the deviation `t`
//! on the estimated probability that a deviation `ε′` on `w` forces:
//!
//! | estimator            | `t`                       | bound                                  |
//! |----------------------|---------------------------|----------------------------------------|
//! | distillation         | `g/4`                     | `2·exp(-(n/8)·g²)`                     |
//! | idle-noisy distill.  | `S·g/4`                   | `2·exp(-(n/8)·S²·g²)`                  |
//! | single-copy Z⊗Z      | `ε′/4`                    | `2·exp(-(n/8)·ε′²)`                    |
//!
//! with sensitivity `g = 2ε′(1 - w) - ε′²`. When `g ≤ 0` the distillation
//! bound says nothing; it is reported as 1 and flagged vacuous, and the
//! corresponding sample count is [`SampleCount::Unreachable`].

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{check_range, Error, Result};
use crate::qcore::WernerParam;

/// Largest sample count reported as a number. Beyond 2^53 consecutive
/// integers are no longer distinguishable as `f64`, so the exact-threshold
/// check stops being meaningful.
pub const MAX_SAMPLES: u64 = 1 << 53;

/// `2·exp(-2n·t²/(b - a)²)` without the cap at 1.
pub fn hoeffding_tail_uncapped(n: u64, t: f64, a: f64, b: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Count { name: "n", value: 0, min: 1 });
    }
    if t.is_nan() || t <= 0.0 {
        return Err(Error::Domain { name: "t", value: t, range: "(0, inf)" });
    }
    if a.is_nan() || b.is_nan() || b <= a {
        return Err(Error::Domain { name: "b - a", value: b - a, range: "(0, inf)" });
    }
    let width = b - a;
    Ok(2.0 * (-2.0 * n as f64 * t * t / (width * width)).exp())
}

/// Two-sided Hoeffding bound on `P(|mean - E[mean]| ≥ t)` for `n`
/// independent variables in `[a, b]`, capped at 1.
pub fn hoeffding_tail(n: u64, t: f64, a: f64, b: f64) -> Result<f64> {
    hoeffding_tail_uncapped(n, t, a, b).map(|v| v.min(1.0))
}

/// A tail bound value, with `vacuous` set when the estimator cannot certify
/// the requested precision at all.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailBound {
    pub value: f64,
    pub vacuous: bool,
}

impl TailBound {
    const VACUOUS: TailBound = TailBound { value: 1.0, vacuous: true };
}

/// Which estimator a bound or sample count refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Distillation,
    Tomography,
    NoisyDistillation,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Distillation => "distillation",
            Method::Tomography => "tomography",
            Method::NoisyDistillation => "noisy-distillation",
        })
    }
}

/// Inputs to a distillation tail bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundSpec {
    pub n: u64,
    pub eps_prime: f64,
    pub w: WernerParam,
    /// Noise attenuation factor in `(0, 1]`; 1 means noiseless.
    pub s: f64,
}

impl BoundSpec {
    pub fn new(n: u64, eps_prime: f64, w: WernerParam, s: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Count { name: "n", value: 0, min: 1 });
        }
        check_eps(eps_prime)?;
        check_attenuation(s)?;
        Ok(BoundSpec { n, eps_prime, w, s })
    }

    pub fn noiseless(n: u64, eps_prime: f64, w: WernerParam) -> Result<Self> {
        Self::new(n, eps_prime, w, 1.0)
    }

    pub fn sensitivity(&self) -> f64 {
        distill_sensitivity(self.eps_prime, self.w)
    }
}

fn check_eps(eps_prime: f64) -> Result<f64> {
    if eps_prime.is_finite() && eps_prime > 0.0 {
        Ok(eps_prime)
    } else {
        Err(Error::Domain { name: "eps_prime", value: eps_prime, range: "(0, inf)" })
    }
}

fn check_attenuation(s: f64) -> Result<f64> {
    if s > 0.0 && s <= 1.0 {
        Ok(s)
    } else {
        Err(Error::Domain { name: "S", value: s, range: "(0, 1]" })
    }
}

fn check_delta(delta: f64) -> Result<f64> {
    if delta > 0.0 && delta < 1.0 {
        Ok(delta)
    } else {
        Err(Error::Domain { name: "delta", value: delta, range: "(0, 1)" })
    }
}

/// `g = 2ε′(1 - w) - ε′²`: the smallest shift in `p00` (times 4) that a
/// shift of `ε′` in `w` can produce, taking the looser of the two sides.
pub fn distill_sensitivity(eps_prime: f64, w: WernerParam) -> f64 {
    2.0 * eps_prime * (1.0 - w.value()) - eps_prime * eps_prime
}

/// Deviation on `p00` implied by a deviation `ε′` on `w`; `None` when the
/// bound would be vacuous.
fn probability_deviation(method: Method, eps_prime: f64, w: WernerParam, s: f64) -> Option<f64> {
    match method {
        Method::Tomography => Some(eps_prime / 4.0),
        Method::Distillation | Method::NoisyDistillation => {
            let g = distill_sensitivity(eps_prime, w);
            let t = s * g / 4.0;
            (t > 0.0).then_some(t)
        }
    }
}

/// Idle-noise distillation bound `2·exp(-(n/8)·S²·(2ε′(1 - w) - ε′²)²)`.
pub fn noisy_distill_failure_bound(spec: &BoundSpec) -> Result<TailBound> {
    let spec = BoundSpec::new(spec.n, spec.eps_prime, spec.w, spec.s)?;
    match probability_deviation(Method::NoisyDistillation, spec.eps_prime, spec.w, spec.s) {
        Some(t) => Ok(TailBound { value: hoeffding_tail(spec.n, t, 0.0, 1.0)?, vacuous: false }),
        None => Ok(TailBound::VACUOUS),
    }
}

/// Noiseless distillation bound `2·exp(-(n/8)·(2ε′(1 - w) - ε′²)²)`.
///
/// Goes through [`noisy_distill_failure_bound`] with `S = 1`.
pub fn distill_failure_bound(n: u64, eps_prime: f64, w: WernerParam) -> Result<TailBound> {
    noisy_distill_failure_bound(&BoundSpec::noiseless(n, eps_prime, w)?)
}

/// Single-copy bound `2·exp(-(n/8)·ε′²)`; independent of `w`.
pub fn tomo_failure_bound(n: u64, eps_prime: f64) -> Result<f64> {
    check_eps(eps_prime)?;
    hoeffding_tail(n, eps_prime / 4.0, 0.0, 1.0)
}

/// Dispatches to the bound for `method`. `w` and `s` are ignored where the
/// method does not use them.
pub fn failure_bound(method: Method, n: u64, eps_prime: f64, w: WernerParam, s: f64) -> Result<TailBound> {
    match method {
        Method::Tomography => Ok(TailBound { value: tomo_failure_bound(n, eps_prime)?, vacuous: false }),
        Method::Distillation => distill_failure_bound(n, eps_prime, w),
        Method::NoisyDistillation => noisy_distill_failure_bound(&BoundSpec::new(n, eps_prime, w, s)?),
    }
}

/// A minimum sample count, or the marker that no finite count achieves the
/// target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SampleCount {
    Samples(u64),
    Unreachable,
}

impl SampleCount {
    pub fn samples(self) -> Option<u64> {
        match self {
            SampleCount::Samples(n) => Some(n),
            SampleCount::Unreachable => None,
        }
    }

    pub fn is_unreachable(self) -> bool {
        self == SampleCount::Unreachable
    }
}

impl fmt::Display for SampleCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SampleCount::Samples(n) => write!(f, "{n}"),
            SampleCount::Unreachable => f.write_str("unreachable"),
        }
    }
}

impl std::str::FromStr for SampleCount {
    type Err = std::num::ParseIntError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s == "unreachable" {
            Ok(SampleCount::Unreachable)
        } else {
            s.parse().map(SampleCount::Samples)
        }
    }
}

impl Serialize for SampleCount {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            SampleCount::Samples(n) => serializer.serialize_u64(*n),
            SampleCount::Unreachable => serializer.serialize_str("unreachable"),
        }
    }
}

impl<'de> Deserialize<'de> for SampleCount {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(u64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Number(n) => Ok(SampleCount::Samples(n)),
            Raw::Text(s) if s == "unreachable" => Ok(SampleCount::Unreachable),
            Raw::Text(s) => Err(serde::de::Error::custom(format!("invalid sample count {s:?}"))),
        }
    }
}

/// Smallest `n ≥ 1` whose failure bound is at most `delta`.
///
/// The closed-form inversion `⌈ln(2/δ)/(2t²)⌉` gives the starting point and
/// the bound itself is then evaluated at `n` and `n - 1` so that the returned
/// count is the exact threshold of the implemented bound.
pub fn min_samples(method: Method, eps_prime: f64, delta: f64, w: WernerParam, s: f64) -> Result<SampleCount> {
    check_eps(eps_prime)?;
    check_delta(delta)?;
    let s = match method {
        Method::NoisyDistillation => check_attenuation(s)?,
        _ => 1.0,
    };
    let Some(t) = probability_deviation(method, eps_prime, w, s) else {
        return Ok(SampleCount::Unreachable);
    };
    let estimate = ((2.0 / delta).ln() / (2.0 * t * t)).ceil();
    if !estimate.is_finite() || estimate > MAX_SAMPLES as f64 {
        return Ok(SampleCount::Unreachable);
    }
    let bound = |n: u64| failure_bound(method, n, eps_prime, w, s).map(|b| b.value);
    let mut n = (estimate as u64).max(1);
    while bound(n)? > delta {
        n += 1;
    }
    while n > 1 && bound(n - 1)? <= delta {
        n -= 1;
    }
    Ok(SampleCount::Samples(n))
}

/// The `w` at which the distillation and single-copy bounds coincide:
/// `2ε′(1 - w) - ε′² = ε′`, i.e. `w = (1 - ε′)/2`. Below it distillation
/// needs fewer samples.
pub fn crossover_w(eps_prime: f64) -> Result<WernerParam> {
    if !(eps_prime > 0.0 && eps_prime < 1.0) {
        return Err(Error::Domain { name: "eps_prime", value: eps_prime, range: "(0, 1)" });
    }
    WernerParam::new((1.0 - eps_prime) / 2.0)
}

/// `S` used for the idle-noise curve by default: `exp(-1/5)`.
pub fn default_attenuation() -> f64 {
    (-0.2f64).exp()
}

/// Minimum sample counts of one estimator over a grid of `w`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleComplexityCurve {
    pub method: Method,
    pub eps_prime: f64,
    pub delta: f64,
    #[serde(rename = "S")]
    pub s: f64,
    pub w_grid: Vec<f64>,
    pub n_min: Vec<SampleCount>,
}

impl SampleComplexityCurve {
    pub fn compute(method: Method, eps_prime: f64, delta: f64, s: f64, w_grid: &[f64]) -> Result<Self> {
        let ws = w_grid
            .iter()
            .map(|&w| WernerParam::new(w))
            .collect::<Result<Vec<_>>>()?;
        let n_min = ws
            .par_iter()
            .map(|&w| min_samples(method, eps_prime, delta, w, s))
            .collect::<Result<Vec<_>>>()?;
        Ok(SampleComplexityCurve {
            method,
            eps_prime,
            delta,
            s: if method == Method::NoisyDistillation { s } else { 1.0 },
            w_grid: w_grid.to_vec(),
            n_min,
        })
    }
}

/// The three curves compared in the sample-complexity figure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Figure1 {
    pub distillation: SampleComplexityCurve,
    pub tomography: SampleComplexityCurve,
    pub noisy_distillation: SampleComplexityCurve,
}

pub fn figure1_curves(eps_prime: f64, delta: f64, s: f64, w_grid: &[f64]) -> Result<Figure1> {
    check_attenuation(s)?;
    Ok(Figure1 {
        distillation: SampleComplexityCurve::compute(Method::Distillation, eps_prime, delta, 1.0, w_grid)?,
        tomography: SampleComplexityCurve::compute(Method::Tomography, eps_prime, delta, 1.0, w_grid)?,
        noisy_distillation: SampleComplexityCurve::compute(Method::NoisyDistillation, eps_prime, delta, s, w_grid)?,
    })
}

/// One row of the figure CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct Figure1Row {
    pub w: f64,
    pub n_distill: SampleCount,
    pub n_tomo: SampleCount,
    pub n_noisy: SampleCount,
    pub flags: Vec<String>,
}

impl Figure1 {
    pub const CSV_HEADER: &'static str = "w,n_distill,n_tomo,n_noisy,flags";

    pub fn rows(&self) -> Vec<Figure1Row> {
        self.distillation
            .w_grid
            .iter()
            .enumerate()
            .map(|(i, &w)| {
                let n_distill = self.distillation.n_min[i];
                let n_noisy = self.noisy_distillation.n_min[i];
                let mut flags = Vec::new();
                if n_distill.is_unreachable() {
                    flags.push("distill_unreachable".to_owned());
                }
                if n_noisy.is_unreachable() {
                    flags.push("noisy_unreachable".to_owned());
                }
                Figure1Row { w, n_distill, n_tomo: self.tomography.n_min[i], n_noisy, flags }
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        write_figure1_csv(&self.rows())
    }
}

pub fn write_figure1_csv(rows: &[Figure1Row]) -> String {
    let mut out = String::from(Figure1::CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            crate::format::csv_float(r.w),
            r.n_distill,
            r.n_tomo,
            r.n_noisy,
            r.flags.join(";")
        ));
    }
    out
}

/// Parses CSV written by [`Figure1::to_csv`].
pub fn parse_figure1_csv(text: &str) -> Result<Vec<Figure1Row>> {
    let bad = |line: &str| Error::Parse(format!("malformed figure CSV line {line:?}"));
    let mut lines = text.lines();
    if lines.next() != Some(Figure1::CSV_HEADER) {
        return Err(bad("header"));
    }
    lines
        .map(|line| {
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != 5 {
                return Err(bad(line));
            }
            let count = |c: &str| c.parse::<SampleCount>().map_err(|_| bad(line));
            Ok(Figure1Row {
                w: cells[0].parse().map_err(|_| bad(line))?,
                n_distill: count(cells[1])?,
                n_tomo: count(cells[2])?,
                n_noisy: count(cells[3])?,
                flags: if cells[4].is_empty() {
                    Vec::new()
                } else {
                    cells[4].split(';').map(str::to_owned).collect()
                },
            })
        })
        .collect()
}

/// Points `start, start + step, …` up to `stop` inclusive, each rounded to
/// 12 significant digits so that e.g. `0.3` prints as `0.3`.
pub fn linear_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Domain { name: "step", value: step, range: "(0, inf)" });
    }
    check_range("start", start, f64::MIN, stop, "(-inf, stop]")?;
    let count = ((stop - start) / step + 1e-9).floor() as u64 + 1;
    Ok((0..count)
        .map(|i| crate::format::round_sig(start + i as f64 * step, 12))
        .collect())
}
