//! Command-line surface: `enhance`, `compare` and `sweep`.
//!
//! Exit codes: 0 on success, 1 on runtime failures (I/O, pipeline), 2 on
//! usage errors.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::histogram::GrayImage;
use crate::metrics::MetricSet;
use crate::pgm::{read_pgm, write_pgm, PgmFormat};
use crate::pipeline::{enhance, sweep, EnhancementParams, EnhancementResult};
use crate::report::{relative_gap, Aggregate, CompareReport, Report, ReportConfig, RunRecord, Section};
use crate::swarm::{role_counts, Variant};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Optimizer {
    Icso,
    Cso,
    ClosedForm,
}

impl Optimizer {
    pub fn name(self) -> &'static str {
        match self {
            Optimizer::Icso => "icso",
            Optimizer::Cso => "cso",
            Optimizer::ClosedForm => "closed-form",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "icso-enhance", version, about = "Histogram-modification contrast enhancement driven by chicken swarm optimization")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enhance one image, optionally over several seeded runs.
    Enhance(EnhanceArgs),
    /// Run several optimizers on one image and report averaged metrics.
    Compare(CompareArgs),
    /// Enhance over a grid of contrast and smoothness weights.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ProblemArgs {
    /// Input PGM (P2 or P5).
    #[arg(long)]
    pub input: PathBuf,
    /// Contrast weight.
    #[arg(long, default_value_t = 5.0)]
    pub lambda: f64,
    /// Smoothness weight.
    #[arg(long, default_value_t = 50000.0)]
    pub gamma: f64,
    /// Generations per swarm run.
    #[arg(long, default_value_t = 1000)]
    pub iters: usize,
    /// Number of chickens.
    #[arg(long, default_value_t = 20)]
    pub pop: usize,
    /// Base seed; run i uses seed + i.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Start the swarm from random positions only.
    #[arg(long)]
    pub no_anchor: bool,
    /// JSON report path (printed to stdout when omitted).
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct EnhanceArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Output PGM.
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value_t = Optimizer::Icso)]
    pub optimizer: Optimizer,
    #[arg(long, default_value_t = 1)]
    pub repeats: usize,
    /// Write a plain-text (P2) image instead of raw P5.
    #[arg(long)]
    pub ascii: bool,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Comma-separated optimizers.
    #[arg(long, value_enum, value_delimiter = ',', required = true)]
    pub optimizers: Vec<Optimizer>,
    #[arg(long, default_value_t = 10)]
    pub repeats: usize,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Comma-separated contrast weights.
    #[arg(long, value_delimiter = ',', required = true)]
    pub lambdas: Vec<f64>,
    /// Comma-separated smoothness weights.
    #[arg(long, value_delimiter = ',', required = true)]
    pub gammas: Vec<f64>,
    #[arg(long, value_enum, default_value_t = Optimizer::Icso)]
    pub optimizer: Optimizer,
    /// Directory receiving one enhanced image per grid point.
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e)
    }
}

type CmdResult = std::result::Result<(), Failure>;

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match &cli.command {
        Command::Enhance(a) => cmd_enhance(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Sweep(a) => cmd_sweep(a),
    }
}

fn exit_code(outcome: CmdResult) -> i32 {
    match outcome {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("run with --help for usage");
            EXIT_USAGE
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            EXIT_FAILURE
        }
    }
}

fn check_problem(p: &ProblemArgs) -> CmdResult {
    if p.input.as_os_str().is_empty() {
        return Err(Failure::Usage("--input must not be empty".into()));
    }
    if p.lambda.is_nan() || p.lambda < 0.0 || p.gamma.is_nan() || p.gamma < 0.0 {
        return Err(Failure::Usage("--lambda and --gamma must be non-negative".into()));
    }
    if p.iters == 0 {
        return Err(Failure::Usage("--iters must be positive".into()));
    }
    let (rn, hn, cn, _) = role_counts(p.pop);
    if p.pop == 0 || rn >= hn || cn == 0 {
        return Err(Failure::Usage(format!(
            "--pop {} is too small to form roosters, hens and chicks",
            p.pop
        )));
    }
    Ok(())
}

fn params_for(p: &ProblemArgs, optimizer: Optimizer) -> EnhancementParams {
    let base = match optimizer {
        Optimizer::Icso => EnhancementParams::swarm(p.lambda, p.gamma, Variant::Icso),
        Optimizer::Cso => EnhancementParams::swarm(p.lambda, p.gamma, Variant::Cso),
        Optimizer::ClosedForm => EnhancementParams::closed_form(p.lambda, p.gamma),
    };
    let mut params = base.with_iters(p.iters).with_seed(p.seed);
    params.swarm = params.swarm.with_population(p.pop);
    params.anchor_init = !p.no_anchor;
    params
}

fn report_config(p: &ProblemArgs, optimizers: &[Optimizer], repeats: usize) -> ReportConfig {
    ReportConfig {
        input: p.input.display().to_string(),
        optimizers: optimizers.iter().map(|o| o.name().to_string()).collect(),
        lambda: p.lambda,
        gamma: p.gamma,
        iters: p.iters,
        population: p.pop,
        base_seed: p.seed,
        repeats,
        anchor_init: !p.no_anchor,
    }
}

fn record(seed: u64, result: &EnhancementResult, wall_time_s: f64) -> RunRecord {
    RunRecord {
        seed,
        achieved_cost: result.achieved_cost,
        oracle_cost: result.oracle_cost,
        gap: relative_gap(result.achieved_cost, result.oracle_cost),
        metrics_before: result.metrics_before,
        metrics_after: result.metrics_after,
        wall_time_s,
    }
}

/// Independent runs with seeds `base_seed + i`, executed in parallel and
/// returned in run order.
fn repeated_runs(
    image: &GrayImage,
    params: &EnhancementParams,
    repeats: usize,
) -> Result<Vec<(RunRecord, EnhancementResult)>> {
    let base = params.swarm.seed;
    (0..repeats)
        .into_par_iter()
        .map(|i| {
            let seed = base.wrapping_add(i as u64);
            let mut p = params.clone();
            p.swarm.seed = seed;
            let start = Instant::now();
            let result = enhance(image, &p)?;
            Ok((record(seed, &result, start.elapsed().as_secs_f64()), result))
        })
        .collect()
}

fn emit_json<T: Serialize>(value: &T, path: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match path {
        Some(path) => std::fs::write(path, text + "\n").map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{text}").map_err(|source| Error::Io {
                path: "<stdout>".into(),
                source,
            })
        }
    }
}

fn metrics_row(label: &str, m: &MetricSet) -> String {
    format!(
        "{label:<14} {:>9.4} {:>9.4} {:>10.4} {:>11.4}",
        m.entropy_bits, m.psnr_db, m.mean_intensity, m.variance
    )
}

pub fn cmd_enhance(args: &EnhanceArgs) -> i32 {
    exit_code(enhance_impl(args))
}

fn enhance_impl(args: &EnhanceArgs) -> CmdResult {
    check_problem(&args.problem)?;
    if args.repeats == 0 {
        return Err(Failure::Usage("--repeats must be at least 1".into()));
    }
    if args.output.as_os_str().is_empty() {
        return Err(Failure::Usage("--output must not be empty".into()));
    }
    let image = read_pgm(&args.problem.input)?;
    let params = params_for(&args.problem, args.optimizer);
    let runs = repeated_runs(&image, &params, args.repeats)?;

    let best = runs
        .iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| {
            a.1.achieved_cost
                .total_cmp(&b.1.achieved_cost)
                .then(i.cmp(j))
        })
        .map(|(_, r)| &r.1)
        .expect("at least one run");
    let format = if args.ascii {
        PgmFormat::Ascii
    } else {
        PgmFormat::Binary
    };
    write_pgm(&best.output_image, &args.output, format)?;

    let records: Vec<RunRecord> = runs.into_iter().map(|(r, _)| r).collect();
    let report = Report {
        config: report_config(&args.problem, &[args.optimizer], args.repeats),
        aggregate: Aggregate::from_runs(&records),
        runs: records,
    };
    emit_json(&report, args.problem.report.as_deref())?;
    Ok(())
}

pub fn cmd_compare(args: &CompareArgs) -> i32 {
    exit_code(compare_impl(args))
}

fn compare_impl(args: &CompareArgs) -> CmdResult {
    check_problem(&args.problem)?;
    if args.optimizers.is_empty() {
        return Err(Failure::Usage("--optimizers needs at least one name".into()));
    }
    if args.repeats == 0 {
        return Err(Failure::Usage("--repeats must be at least 1".into()));
    }
    let image = read_pgm(&args.problem.input)?;
    let mut sections = Vec::with_capacity(args.optimizers.len());
    for &opt in &args.optimizers {
        let params = params_for(&args.problem, opt);
        let runs: Vec<RunRecord> = repeated_runs(&image, &params, args.repeats)?
            .into_iter()
            .map(|(r, _)| r)
            .collect();
        sections.push(Section {
            optimizer: opt.name().to_string(),
            aggregate: Aggregate::from_runs(&runs),
            runs,
        });
    }
    let report = CompareReport {
        config: report_config(&args.problem, &args.optimizers, args.repeats),
        sections,
    };
    emit_json(&report, args.problem.report.as_deref())?;
    if args.problem.report.is_some() {
        println!(
            "{:<14} {:>9} {:>9} {:>10} {:>11} {:>12}",
            "", "entropy", "psnr", "mean", "variance", "median gap"
        );
        if let Some(first) = report.sections.first() {
            println!("{}", metrics_row("original", &first.aggregate.metrics_before));
        }
        for s in &report.sections {
            println!(
                "{} {:>12.4e}",
                metrics_row(&s.optimizer, &s.aggregate.metrics_after),
                s.aggregate.median_gap
            );
        }
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct SweepPoint {
    lambda: f64,
    gamma: f64,
    achieved_cost: f64,
    oracle_cost: f64,
    gap: f64,
    metrics_after: MetricSet,
}

#[derive(Debug, Serialize)]
struct SweepReport {
    config: ReportConfig,
    points: Vec<SweepPoint>,
}

pub fn cmd_sweep(args: &SweepArgs) -> i32 {
    exit_code(sweep_impl(args))
}

fn sweep_impl(args: &SweepArgs) -> CmdResult {
    check_problem(&args.problem)?;
    if args.lambdas.is_empty() || args.gammas.is_empty() {
        return Err(Failure::Usage("--lambdas and --gammas must be non-empty".into()));
    }
    if args.lambdas.iter().chain(&args.gammas).any(|v| v.is_nan() || *v < 0.0) {
        return Err(Failure::Usage("weights must be non-negative".into()));
    }
    let image = read_pgm(&args.problem.input)?;
    let params = params_for(&args.problem, args.optimizer);
    let results = sweep(&image, &args.lambdas, &args.gammas, &params)?;
    if let Some(dir) = &args.output_dir {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.display().to_string(),
            source,
        })?;
        for r in &results {
            let name = format!("sweep_l{}_g{}.pgm", r.lambda, r.gamma);
            write_pgm(&r.output_image, dir.join(name), PgmFormat::Binary)?;
        }
    }
    let report = SweepReport {
        config: report_config(&args.problem, &[args.optimizer], 1),
        points: results
            .iter()
            .map(|r| SweepPoint {
                lambda: r.lambda,
                gamma: r.gamma,
                achieved_cost: r.achieved_cost,
                oracle_cost: r.oracle_cost,
                gap: r.relative_gap(),
                metrics_after: r.metrics_after,
            })
            .collect(),
    };
    emit_json(&report, args.problem.report.as_deref())?;
    Ok(())
}
