//! Command-line front end.
//!
//! | command    | output                                                   |
//! |------------|----------------------------------------------------------|
//! | `exact`    | closed-form statistics of one round                      |
//! | `bounds`   | minimum sample counts of the three estimators            |
//! | `figure1`  | sample-complexity curves as CSV (`w,n_distill,n_tomo,n_noisy,flags`) or JSON |
//! | `run`      | one simulated estimation run, or a repetition harness (`rep,seed,w_hat,fail`) |
//! | `validate` | closed forms against the dense oracle                    |
//!
//! Exit codes: 0 success, 2 bad command line, 3 value out of domain,
//! 4 I/O failure, 5 a validation check failed.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bounds::{
    default_attenuation, figure1_curves, linear_grid, noisy_distill_failure_bound, BoundSpec,
};
use crate::error::Error;
use crate::experiment::{empirical_failure_rate, run_algorithm1, NoiseSchedule, RepRecord, RepetitionConfig};
use crate::format::{fmt_sig, to_json_string, TABLE_DIGITS};
use crate::protocol::{kept_fidelity, outcome_distribution, success_probability, NoisePairConfig};
use crate::qcore::{DepolarizingParam, WernerParam};
use crate::validate::{run_checks, ValidateOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_IO: i32 = 4;
pub const EXIT_VALIDATION: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "werner-distill", version, about = "Werner-parameter estimation from distillation statistics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form outcome statistics and fidelities of one round
    Exact(ExactArgs),
    /// Minimum sample counts for a precision and failure probability
    Bounds(BoundsArgs),
    /// Sample-complexity curves for plotting
    Figure1(Figure1Args),
    /// Simulate the estimation procedure
    Run(RunArgs),
    /// Check closed forms against the dense density-matrix oracle
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    #[arg(long)]
    pub w: f64,
    /// Depolarizing strength on the idled control copy
    #[arg(long, default_value_t = 0.0)]
    pub x: f64,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, default_value_t = 0.0)]
    pub w_start: f64,
    #[arg(long, default_value_t = 0.95)]
    pub w_stop: f64,
    #[arg(long, default_value_t = 0.01)]
    pub w_step: f64,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Target precision on w
    #[arg(long, visible_alias = "eps-prime", default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.01)]
    pub delta: f64,
    /// Single w; overrides the grid
    #[arg(long)]
    pub w: Option<f64>,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Noise attenuation factor for the noisy column [default: exp(-1/5)]
    #[arg(long = "S")]
    pub s: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct Figure1Args {
    #[arg(long, visible_alias = "eps-prime", default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.01)]
    pub delta: f64,
    /// Noise attenuation factor [default: exp(-1/5)]
    #[arg(long = "S")]
    pub s: Option<f64>,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub w: f64,
    /// Number of distillation rounds
    #[arg(long = "N")]
    pub n: u64,
    /// Target precision on w
    #[arg(long)]
    pub eps_w: f64,
    /// Fixed depolarizing strength on the idled copy
    #[arg(long, conflicts_with_all = ["t", "coherence_time"])]
    pub x: Option<f64>,
    /// Idle time of the control copy
    #[arg(long, requires = "coherence_time")]
    pub t: Option<f64>,
    /// Coherence time of the memory
    #[arg(long = "T", requires = "t")]
    pub coherence_time: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Run the repetition harness with this many independent runs
    #[arg(long)]
    pub reps: Option<u64>,
    /// Worker threads (results do not depend on it)
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Intervals per unit on the oracle grids
    #[arg(long, default_value_t = 100)]
    pub grid_steps: u32,
    /// Deliberately break one check (harness self-test)
    #[arg(long, hide = true)]
    pub perturb: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid value for {flag}: {source}")]
    Flag { flag: &'static str, source: Error },
    #[error(transparent)]
    Domain(#[from] Error),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0} validation check(s) failed")]
    Validation(usize),
    #[error("--format {0:?} is not supported by this command")]
    Unsupported(Format),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Flag { .. } | CliError::Domain(_) => EXIT_DOMAIN,
            CliError::Io { .. } => EXIT_IO,
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Unsupported(_) => EXIT_PARSE,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn flag<T>(name: &'static str, r: crate::Result<T>) -> CliResult<T> {
    r.map_err(|source| CliError::Flag { flag: name, source })
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                return EXIT_PARSE;
            }
            let _ = write!(stdout, "{text}");
            return EXIT_OK;
        }
    };
    match execute(&cli.command, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: &Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    match command {
        Command::Exact(a) => cmd_exact(a, stdout),
        Command::Bounds(a) => cmd_bounds(a, stdout),
        Command::Figure1(a) => cmd_figure1(a, stdout),
        Command::Run(a) => cmd_run(a, stdout, stderr),
        Command::Validate(a) => cmd_validate(a, stdout),
    }
}

fn emit(stdout: &mut dyn Write, out: Option<&PathBuf>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io { path: path.clone(), source }),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io { path: PathBuf::from("<stdout>"), source }),
    }
}

fn table(rows: &[(&str, String)]) -> String {
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    rows.iter().map(|(k, v)| format!("{k:<width$}  {v}\n")).collect()
}

#[derive(Debug, Serialize)]
pub struct ExactReport {
    pub w: f64,
    pub x: f64,
    pub p00: f64,
    pub p01: f64,
    pub p10: f64,
    pub p11: f64,
    pub success: f64,
    #[serde(rename = "F")]
    pub fidelity: f64,
    #[serde(rename = "F_prime")]
    pub fidelity_after: f64,
}

pub fn exact_report(w: f64, x: f64) -> CliResult<ExactReport> {
    let cfg = NoisePairConfig {
        w: flag("--w", WernerParam::new(w))?,
        x: flag("--x", DepolarizingParam::new(x))?,
    };
    let d = outcome_distribution(&cfg);
    Ok(ExactReport {
        w,
        x,
        p00: d.p00,
        p01: d.p01,
        p10: d.p10,
        p11: d.p11,
        success: success_probability(&cfg),
        fidelity: cfg.w.fidelity(),
        fidelity_after: kept_fidelity(&cfg),
    })
}

fn cmd_exact(a: &ExactArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let r = exact_report(a.w, a.x)?;
    let text = match a.format {
        Format::Json => to_json_string(&r)?,
        Format::Table => {
            let f = |v: f64| fmt_sig(v, TABLE_DIGITS);
            table(&[
                ("w", f(r.w)),
                ("x", f(r.x)),
                ("p00", f(r.p00)),
                ("p01", f(r.p01)),
                ("p10", f(r.p10)),
                ("p11", f(r.p11)),
                ("success", f(r.success)),
                ("F", f(r.fidelity)),
                ("F'", f(r.fidelity_after)),
            ])
        }
        Format::Csv => {
            let f = crate::format::csv_float;
            format!(
                "w,x,p00,p01,p10,p11,success,F,F_prime\n{},{},{},{},{},{},{},{},{}\n",
                f(r.w),
                f(r.x),
                f(r.p00),
                f(r.p01),
                f(r.p10),
                f(r.p11),
                f(r.success),
                f(r.fidelity),
                f(r.fidelity_after)
            )
        }
    };
    emit(stdout, None, &text)
}

fn resolve_grid(w: Option<f64>, grid: &GridArgs) -> CliResult<Vec<f64>> {
    let ws = match w {
        Some(w) => vec![w],
        None => flag("--w-step", linear_grid(grid.w_start, grid.w_stop, grid.w_step))?,
    };
    for &w in &ws {
        flag(if ws.len() == 1 { "--w" } else { "--w-start/--w-stop" }, WernerParam::new(w))?;
    }
    Ok(ws)
}

fn curves(eps: f64, delta: f64, s: Option<f64>, ws: &[f64]) -> CliResult<crate::bounds::Figure1> {
    flag("--eps", if eps > 0.0 { Ok(eps) } else { Err(Error::Domain { name: "eps", value: eps, range: "(0, inf)" }) })?;
    flag("--delta", if delta > 0.0 && delta < 1.0 { Ok(()) } else { Err(Error::Domain { name: "delta", value: delta, range: "(0, 1)" }) })?;
    let s = s.unwrap_or_else(default_attenuation);
    flag("--S", if s > 0.0 && s <= 1.0 { Ok(()) } else { Err(Error::Domain { name: "S", value: s, range: "(0, 1]" }) })?;
    Ok(figure1_curves(eps, delta, s, ws)?)
}

fn cmd_bounds(a: &BoundsArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let ws = resolve_grid(a.w, &a.grid)?;
    let fig = curves(a.eps, a.delta, a.s, &ws)?;
    let text = match a.format {
        Format::Csv => fig.to_csv(),
        Format::Json => to_json_string(&fig)?,
        Format::Table => {
            let mut s = format!(
                "# eps' = {}, delta = {}, S = {}\n{:>8}  {:>14}  {:>14}  {:>14}  flags\n",
                fmt_sig(a.eps, TABLE_DIGITS),
                fmt_sig(a.delta, TABLE_DIGITS),
                fmt_sig(fig.noisy_distillation.s, TABLE_DIGITS),
                "w",
                "n_distill",
                "n_tomo",
                "n_noisy"
            );
            for r in fig.rows() {
                s.push_str(&format!(
                    "{:>8}  {:>14}  {:>14}  {:>14}  {}\n",
                    fmt_sig(r.w, TABLE_DIGITS),
                    r.n_distill.to_string(),
                    r.n_tomo.to_string(),
                    r.n_noisy.to_string(),
                    r.flags.join(";")
                ));
            }
            s
        }
    };
    emit(stdout, None, &text)
}

fn cmd_figure1(a: &Figure1Args, stdout: &mut dyn Write) -> CliResult<()> {
    let ws = resolve_grid(None, &a.grid)?;
    let fig = curves(a.eps, a.delta, a.s, &ws)?;
    let text = match a.format {
        Format::Csv => fig.to_csv(),
        Format::Json => to_json_string(&fig)?,
        Format::Table => return Err(CliError::Unsupported(Format::Table)),
    };
    emit(stdout, a.out.as_ref(), &text)
}

fn schedule(a: &RunArgs) -> CliResult<NoiseSchedule> {
    match (a.x, a.t, a.coherence_time) {
        (Some(x), _, _) => {
            flag("--x", DepolarizingParam::new(x))?;
            Ok(NoiseSchedule::FixedX { x })
        }
        (None, Some(t), Some(coherence_time)) => {
            flag("--t/--T", DepolarizingParam::from_idle(t, coherence_time))?;
            Ok(NoiseSchedule::ConstantIdle { t, coherence_time })
        }
        _ => Ok(NoiseSchedule::Noiseless),
    }
}

/// Summary line of the repetition harness.
#[derive(Debug, Serialize)]
pub struct RepSummary {
    pub reps: u64,
    pub failures: u64,
    pub rate: f64,
    pub bound: f64,
    pub bound_vacuous: bool,
    /// `bound + 3·√(bound(1 - bound)/reps)`
    pub threshold: f64,
    pub within_bound: bool,
}

#[derive(Debug, Serialize)]
struct RepReport<'a> {
    summary: &'a RepSummary,
    records: &'a [RepRecord],
}

fn cmd_run(a: &RunArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let w = flag("--w", WernerParam::new(a.w))?;
    if a.n == 0 {
        return Err(CliError::Flag { flag: "--N", source: Error::Count { name: "N", value: 0, min: 1 } });
    }
    if !(a.eps_w > 0.0 && a.eps_w.is_finite()) {
        return Err(CliError::Flag {
            flag: "--eps-w",
            source: Error::Domain { name: "eps_w", value: a.eps_w, range: "(0, inf)" },
        });
    }
    let schedule = schedule(a)?;
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(k) = a.threads {
            b = b.num_threads(k.max(1));
        }
        b.build().expect("thread pool")
    };

    let Some(reps) = a.reps else {
        let result = pool.install(|| run_algorithm1(a.n, a.eps_w, w, &schedule, a.seed))?;
        let text = match a.format {
            Format::Json => to_json_string(&result)?,
            Format::Csv => format!("{}\n{}\n", crate::experiment::ExperimentResult::CSV_HEADER, result.csv_record()),
            Format::Table => return Err(CliError::Unsupported(Format::Table)),
        };
        return emit(stdout, a.out.as_ref(), &text);
    };

    if reps == 0 {
        return Err(CliError::Flag { flag: "--reps", source: Error::Count { name: "reps", value: 0, min: 1 } });
    }
    let cfg = RepetitionConfig { true_w: w, schedule: schedule.clone(), n: a.n, eps_w: a.eps_w, master_seed: a.seed };
    let report = pool.install(|| empirical_failure_rate(&cfg, reps))?;
    let s = schedule.resolve(a.n)?.realized_attenuation();
    let bound = noisy_distill_failure_bound(&BoundSpec::new(a.n, a.eps_w, w, s)?)?;
    let sigma = (bound.value * (1.0 - bound.value) / reps as f64).sqrt();
    let summary = RepSummary {
        reps,
        failures: report.failures,
        rate: report.rate,
        bound: bound.value,
        bound_vacuous: bound.vacuous,
        threshold: bound.value + 3.0 * sigma,
        within_bound: report.rate <= bound.value + 3.0 * sigma,
    };
    let text = match a.format {
        Format::Json => to_json_string(&RepReport { summary: &summary, records: &report.records })?,
        Format::Csv => {
            let mut s = String::from(RepRecord::CSV_HEADER);
            s.push('\n');
            for r in &report.records {
                s.push_str(&r.csv_record());
                s.push('\n');
            }
            s
        }
        Format::Table => return Err(CliError::Unsupported(Format::Table)),
    };
    emit(stdout, a.out.as_ref(), &text)?;
    if a.format == Format::Csv {
        // the CSV body holds only records; the summary goes alongside
        let line = format!(
            "reps={} failures={} rate={} bound={} threshold={} within_bound={}\n",
            summary.reps,
            summary.failures,
            fmt_sig(summary.rate, TABLE_DIGITS),
            fmt_sig(summary.bound, TABLE_DIGITS),
            fmt_sig(summary.threshold, TABLE_DIGITS),
            summary.within_bound
        );
        let sink: &mut dyn Write = if a.out.is_some() { stdout } else { stderr };
        sink.write_all(line.as_bytes())
            .map_err(|source| CliError::Io { path: PathBuf::from("<stdout>"), source })?;
    }
    Ok(())
}

fn cmd_validate(a: &ValidateArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let results = run_checks(&ValidateOptions { grid_steps: a.grid_steps, perturb: a.perturb.clone() })?;
    let failed = results.iter().filter(|r| !r.passed).count();
    let text = match a.format {
        Format::Json => to_json_string(&results)?,
        _ => results
            .iter()
            .map(|r| format!("{} {:<22} {}\n", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail))
            .collect(),
    };
    emit(stdout, None, &text)?;
    if failed > 0 {
        Err(CliError::Validation(failed))
    } else {
        Ok(())
    }
}
