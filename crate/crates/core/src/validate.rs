//! Cross-checks between the closed forms and the dense oracle, runnable on
//! demand from the command line.

use serde::Serialize;

use crate::bounds::{crossover_w, min_samples, failure_bound, Method, SampleCount};
use crate::error::Result;
use crate::protocol::{
    fidelity_after_distillation, outcome_distribution, p00_from_w, w_from_p00, NoisePairConfig,
};
use crate::qcore::{depolarize, distillation_round, measure_zz, werner_state, DepolarizingParam, WernerParam};
use crate::tomography::{tomo_distribution, tomo_p00_from_w, tomo_w_from_p00};

/// Names of all checks, in execution order.
pub const CHECK_NAMES: [&str; 9] = [
    "oracle-equivalence",
    "depolarize-closure",
    "p00-round-trip",
    "p00-monotone",
    "tomo-round-trip",
    "tomo-oracle",
    "fidelity-recursion",
    "crossover",
    "min-samples-threshold",
];

#[derive(Debug, Clone)]
pub struct ValidateOptions {
    /// Number of intervals per unit of `w` (and `F`) on the check grids.
    pub grid_steps: u32,
    /// Check whose analytic side gets deliberately perturbed (by `1e-9` for
    /// tolerance checks, by whole units past tolerance for the integer ones) to
    /// confirm the harness catches it.
    pub perturb: Option<String>,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions { grid_steps: 100, perturb: None }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn grid(steps: u32) -> impl Iterator<Item = f64> {
    (0..=steps).map(move |i| i as f64 / steps as f64)
}

/// Tracks the worst deviation and where it occurred.
struct Worst {
    value: f64,
    at: String,
}

impl Worst {
    fn new() -> Self {
        Worst { value: 0.0, at: String::new() }
    }

    fn update(&mut self, deviation: f64, at: impl FnOnce() -> String) {
        if deviation > self.value || deviation.is_nan() {
            self.value = deviation;
            self.at = at();
        }
    }

    fn finish(self, name: &'static str, tol: f64) -> CheckResult {
        let passed = self.value <= tol;
        let detail = if self.at.is_empty() {
            format!("max deviation 0 (tol {tol:e})")
        } else {
            format!("max deviation {:e} at {} (tol {tol:e})", self.value, self.at)
        };
        CheckResult { name, passed, detail }
    }
}

pub fn run_checks(opts: &ValidateOptions) -> Result<Vec<CheckResult>> {
    let steps = opts.grid_steps.max(1);
    let bump = |name: &str| if opts.perturb.as_deref() == Some(name) { 1e-9 } else { 0.0 };
    let mut out = Vec::new();

    // analytic outcome distribution vs dense pipeline over (w, x)
    let mut worst = Worst::new();
    for wv in grid(steps) {
        for xv in grid(10) {
            let cfg = NoisePairConfig::new(wv, xv)?;
            let control = depolarize(&werner_state(cfg.w), cfg.x)?;
            let dense = distillation_round(&control, &werner_state(cfg.w))?.distribution;
            let mut analytic = outcome_distribution(&cfg);
            analytic.p00 += bump("oracle-equivalence");
            worst.update(dense.max_abs_diff(&analytic), || format!("w={wv}, x={xv}"));
        }
    }
    out.push(worst.finish("oracle-equivalence", 1e-12));

    let mut worst = Worst::new();
    for wv in grid(steps) {
        for xv in grid(10) {
            let w = WernerParam::new(wv)?;
            let dense = depolarize(&werner_state(w), DepolarizingParam::new(xv)?)?;
            let w2 = 1.0 - (1.0 - xv) * (1.0 - wv) + bump("depolarize-closure");
            let closed = werner_state(WernerParam::new(w2.min(1.0))?);
            worst.update(dense.max_abs_diff(&closed), || format!("w={wv}, x={xv}"));
        }
    }
    out.push(worst.finish("depolarize-closure", 1e-12));

    // round trips use a fixed 1001-point grid: near w = 1 the square root
    // amplifies rounding as 1/(1 - w)
    let mut worst = Worst::new();
    for wv in grid(1000) {
        let back = w_from_p00(p00_from_w(WernerParam::new(wv)?) + bump("p00-round-trip"))?;
        worst.update((back.w.value() - wv).abs(), || format!("w={wv}"));
    }
    out.push(worst.finish("p00-round-trip", 1e-12));

    let mut violations = 0usize;
    let mut first = String::new();
    let values: Vec<(f64, f64)> = grid(10 * steps)
        .map(|wv| Ok((wv, p00_from_w(WernerParam::new(wv)?))))
        .collect::<Result<_>>()?;
    for pair in values.windows(2) {
        let next = pair[1].1 + if pair[1].0 >= 0.5 { bump("p00-monotone") * 1e9 } else { 0.0 };
        if next >= pair[0].1 {
            violations += 1;
            if first.is_empty() {
                first = format!(" first at w={}", pair[1].0);
            }
        }
    }
    out.push(CheckResult {
        name: "p00-monotone",
        passed: violations == 0,
        detail: format!("{violations} non-decreasing steps{first}"),
    });

    let mut worst = Worst::new();
    for wv in grid(1000) {
        let back = tomo_w_from_p00(tomo_p00_from_w(WernerParam::new(wv)?) + bump("tomo-round-trip"))?;
        worst.update((back.w.value() - wv).abs(), || format!("w={wv}"));
    }
    out.push(worst.finish("tomo-round-trip", 1e-12));

    let mut worst = Worst::new();
    for wv in grid(steps) {
        let w = WernerParam::new(wv)?;
        let mut analytic = tomo_distribution(w);
        analytic.p00 += bump("tomo-oracle");
        worst.update(measure_zz(&werner_state(w))?.max_abs_diff(&analytic), || format!("w={wv}"));
    }
    out.push(worst.finish("tomo-oracle", 1e-12));

    // F' formula vs fidelity of the dense post-selected pair
    let mut worst = Worst::new();
    for i in 0..=steps {
        let f = 0.25 + 0.75 * i as f64 / steps as f64;
        let w = WernerParam::from_fidelity(f)?;
        let rho = werner_state(w);
        let kept = distillation_round(&rho, &rho)?.kept_state();
        let dense = match kept {
            Some(k) => k.phi_plus_fidelity()?,
            None => f64::NAN,
        };
        let formula = fidelity_after_distillation(w.fidelity())? + bump("fidelity-recursion");
        worst.update((dense - formula).abs(), || format!("F={f}"));
    }
    out.push(worst.finish("fidelity-recursion", 1e-12));

    let mut worst = Worst::new();
    for &eps in &[0.05, 0.1, 0.2] {
        let w = crossover_w(eps)?;
        let d = min_samples(Method::Distillation, eps, 0.01, w, 1.0)?;
        let t = min_samples(Method::Tomography, eps, 0.01, w, 1.0)?;
        let gap = match (d, t) {
            (SampleCount::Samples(a), SampleCount::Samples(b)) => a.abs_diff(b) as f64,
            _ => f64::INFINITY,
        } + bump("crossover") * 2e9;
        worst.update(gap, || format!("eps={eps}"));
    }
    out.push(worst.finish("crossover", 1.0));

    let mut failures = Vec::new();
    for method in [Method::Distillation, Method::Tomography, Method::NoisyDistillation] {
        for &eps in &[0.05, 0.1, 0.2] {
            for &delta in &[0.01, 0.05] {
                for &wv in &[0.0, 0.25, 0.45, 0.6] {
                    let w = WernerParam::new(wv)?;
                    let s = (-0.2f64).exp();
                    let SampleCount::Samples(n) = min_samples(method, eps, delta, w, s)? else {
                        continue;
                    };
                    let at = failure_bound(method, n, eps, w, s)?.value + bump("min-samples-threshold") * 1e9;
                    let below = if n > 1 { failure_bound(method, n - 1, eps, w, s)?.value } else { 2.0 };
                    if !(at <= delta && below > delta) {
                        failures.push(format!("{method} eps={eps} delta={delta} w={wv} n={n}"));
                    }
                }
            }
        }
    }
    out.push(CheckResult {
        name: "min-samples-threshold",
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            "bound(n) <= delta < bound(n-1) everywhere".to_owned()
        } else {
            format!("violated at {}", failures.join(", "))
        },
    });

    Ok(out)
}
