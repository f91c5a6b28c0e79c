//! Command-line front end: `analyze`, `curves`, `simulate`.
//!
//! Sample sizes on the command line are always given in runs `r`; one paired
//! seed costs two runs.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 2 | bad command-line usage |
//! | 3 | file could not be read or written |
//! | 4 | malformed run data (parse errors, duplicates, non-finite values) |
//! | 5 | pairing failure (orphan seeds in strict mode, unknown metric, nothing paired) |
//! | 6 | statistic undefined on the data (too few seeds, zero variance, zero effect) |
//! | 7 | invalid analysis parameters (alpha, grid, replicates, missing MDE) |
//! | 8 | invalid simulator spec |

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::data::PairedDataset;
use crate::error::{Error, Result};
use crate::io::{
    analyze_metric, build_paired_dataset, parse_run_file, render_effects_table, serialize_report,
    write_curves, AnalysisReport, EffectRow, PairingPolicy, RunFile,
};
use crate::resampling::{
    ci_curve, power_curve, se_curve, sign_stability_curve, CurvePair, IndependentMode,
    SubsampleConfig, DEFAULT_REPLICATES, POWER_TARGET,
};
use crate::stats::IntervalKind;
use crate::synthetic::{generate, SyntheticSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_INPUT: i32 = 4;
pub const EXIT_PAIRING: i32 = 5;
pub const EXIT_DEGENERATE: i32 = 6;
pub const EXIT_CONFIG: i32 = 7;
pub const EXIT_SPEC: i32 = 8;

/// Maps an error to its exit-code class.
pub fn exit_code(err: &Error) -> i32 {
    use Error::*;
    match err {
        Io(_) => EXIT_IO,
        MalformedInput { .. } | DuplicateRecord { .. } | NonFiniteValue { .. } | InvalidDataset(_) => {
            EXIT_INPUT
        }
        OrphanSeeds(_) | UnknownMetric(_) | EmptyAfterPairing(_) => EXIT_PAIRING,
        EmptyDataset
        | DegenerateSe { .. }
        | DegenerateVariance { .. }
        | DegenerateDenominator
        | DegenerateDifferences
        | AllZeroDifferences
        | PerfectCorrelation { .. }
        | TooFewSeeds { .. }
        | SignReferenceUndefined
        | NonpositiveSe(_) => EXIT_DEGENERATE,
        InvalidAlpha(_) | InvalidProbability(_) | OddRunCount(_) | GridInfeasible(_)
        | InvalidConfig(_) => EXIT_CONFIG,
        InvalidSpec(_) => EXIT_SPEC,
    }
}

#[derive(Debug, Parser)]
#[command(name = "pairseed", version, about = "Paired seed evaluation of two simulator regimes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Effect estimates, intervals, design statistics and tests per metric.
    Analyze(AnalyzeArgs),
    /// Subsampling curves (SE, CI half-width, power, sign agreement) over run budgets.
    Curves(CurvesArgs),
    /// Write a synthetic common-random-numbers dataset as a run file.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PairingArg {
    Strict,
    DropOrphans,
}

impl From<PairingArg> for PairingPolicy {
    fn from(p: PairingArg) -> Self {
        match p {
            PairingArg::Strict => PairingPolicy::Strict,
            PairingArg::DropOrphans => PairingPolicy::DropOrphans,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StatisticArg {
    Se,
    Ci,
    Power,
    Sign,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IndependentArg {
    Disjoint,
    Analytic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Run file (`seed,regime,metric,value` table or structured JSON).
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "drop-orphans")]
    pub pairing: PairingArg,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Metric(s) to analyze; defaults to every metric present in both regimes.
    #[arg(long, value_delimiter = ',')]
    pub metric: Vec<String>,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Use Student-t critical values instead of normal ones (small-sample extension).
    #[arg(long)]
    pub t_interval: bool,
    /// Report destination; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CurvesArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Metric to resample; optional when the file holds a single paired metric.
    #[arg(long)]
    pub metric: Option<String>,
    #[arg(long, value_enum)]
    pub statistic: StatisticArg,
    /// Run budgets, e.g. `4,8,16`. Defaults to 4, 8, ... up to the seed count.
    #[arg(long, value_delimiter = ',')]
    pub grid: Vec<usize>,
    #[arg(long, default_value_t = DEFAULT_REPLICATES)]
    pub replicates: usize,
    #[arg(long, default_value_t = 0)]
    pub rng_seed: u64,
    /// Minimum detectable effect; required for `--statistic power`.
    #[arg(long)]
    pub mde: Option<f64>,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// How independent-design estimates are formed from paired data.
    #[arg(long, value_enum, default_value = "disjoint")]
    pub independent: IndependentArg,
    /// Worker threads for resampling; output does not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Curve file to write (`statistic,design,r,value`).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// JSON spec file; overrides the individual flags.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub delta: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub mu0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma0: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub rho: f64,
    /// Total runs; half as many seeds, each run under both regimes.
    #[arg(long, default_value_t = 44)]
    pub runs: usize,
    #[arg(long, default_value_t = 0)]
    pub master_seed: u64,
    #[arg(long, default_value = "outcome")]
    pub metric: String,
    #[arg(long)]
    pub out: PathBuf,
    /// Output layout; inferred from the `--out` extension when omitted.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Analyze(a) => cmd_analyze(a),
        Command::Curves(a) => match a.threads {
            Some(threads) => rayon::ThreadPoolBuilder::new()
                .num_threads(threads.max(1))
                .build()
                .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?
                .install(|| cmd_curves(a)),
            None => cmd_curves(a),
        },
        Command::Simulate(a) => cmd_simulate(a),
    }
}

fn read_run_file(path: &Path) -> Result<RunFile> {
    let bytes = fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_run_file(&bytes)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn pair(file: &RunFile, metric: &str, policy: PairingPolicy) -> Result<(PairedDataset, crate::io::PairingReport)> {
    let (data, report) = build_paired_dataset(file, metric, policy)?;
    if report.orphan_count() > 0 {
        eprintln!(
            "warning: metric {metric:?}: dropped {} orphan seed(s) (regime 1 only: {:?}; regime 0 only: {:?})",
            report.orphan_count(),
            report.orphan_seeds_regime1,
            report.orphan_seeds_regime0
        );
    }
    Ok((data, report))
}

pub fn cmd_analyze(args: &AnalyzeArgs) -> Result<()> {
    let file = read_run_file(&args.input.input)?;
    let interval = if args.t_interval {
        IntervalKind::StudentT
    } else {
        IntervalKind::Normal
    };
    crate::inference::special::check_alpha(args.alpha)?;
    let metrics = if args.metric.is_empty() {
        let paired = crate::io::PairingReport::metrics_in(&file);
        if paired.is_empty() {
            return Err(Error::EmptyAfterPairing("<all>".into()));
        }
        paired
    } else {
        args.metric.clone()
    };

    let mut report = AnalysisReport::new(args.alpha, interval);
    report.provenance = file.provenance.clone();
    for metric in &metrics {
        let (data, pairing) = pair(&file, metric, args.input.pairing.into())?;
        let mut m = analyze_metric(&data, args.alpha, interval)?;
        m.pairing = Some(pairing);
        for advisory in &m.advisories {
            eprintln!("note: metric {metric:?}: {advisory}");
        }
        report.results.push(m);
    }

    let rows: Vec<EffectRow> = report.results.iter().map(EffectRow::from).collect();
    eprint!("{}", render_effects_table(&rows, 3));
    let bytes = serialize_report(&report);
    match &args.out {
        Some(path) => write_file(path, &bytes),
        None => std::io::stdout().write_all(&bytes).map_err(Error::from),
    }
}

fn single_metric(file: &RunFile, requested: Option<&str>) -> Result<String> {
    if let Some(m) = requested {
        return Ok(m.to_owned());
    }
    let metrics = crate::io::PairingReport::metrics_in(file);
    match metrics.as_slice() {
        [only] => Ok(only.clone()),
        [] => Err(Error::EmptyAfterPairing("<all>".into())),
        many => Err(Error::InvalidConfig(format!(
            "file holds several metrics ({}); choose one with --metric",
            many.join(", ")
        ))),
    }
}

pub fn cmd_curves(args: &CurvesArgs) -> Result<()> {
    let file = read_run_file(&args.input.input)?;
    let metric = single_metric(&file, args.metric.as_deref())?;
    let (data, _) = pair(&file, &metric, args.input.pairing.into())?;
    let mde = match (args.statistic, args.mde) {
        (StatisticArg::Power, None) => {
            return Err(Error::InvalidConfig("--mde is required for --statistic power".into()))
        }
        (_, m) => m.unwrap_or(0.0),
    };
    let cfg = SubsampleConfig {
        replicates: args.replicates,
        rng_seed: args.rng_seed,
        grid: args.grid.clone(),
        alpha: args.alpha,
        mde,
        independent: match args.independent {
            IndependentArg::Disjoint => IndependentMode::Disjoint,
            IndependentArg::Analytic => IndependentMode::Analytic,
        },
    };
    let curves: CurvePair = match args.statistic {
        StatisticArg::Se => se_curve(&data, &cfg)?,
        StatisticArg::Ci => ci_curve(&data, &cfg)?,
        StatisticArg::Sign => sign_stability_curve(&data, &cfg)?,
        StatisticArg::Power => {
            let p = power_curve(&data, &cfg)?;
            let show = |r: Option<usize>| r.map_or_else(|| "none".to_string(), |r| r.to_string());
            println!(
                "{:.0}% power crossing (runs): paired={} independent={}",
                POWER_TARGET * 100.0,
                show(p.paired_crossing),
                show(p.independent_crossing)
            );
            p.curves
        }
    };
    write_file(&args.out, &write_curves(curves.series()))
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let spec = match &args.spec {
        Some(path) => {
            let bytes = fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            serde_json::from_slice::<SyntheticSpec>(&bytes)
                .map_err(|e| Error::InvalidSpec(format!("{}: {e}", path.display())))?
        }
        None => {
            if args.runs == 0 || !args.runs.is_multiple_of(2) {
                return Err(Error::InvalidSpec(format!(
                    "--runs must be a positive even number, got {}",
                    args.runs
                )));
            }
            SyntheticSpec {
                delta: args.delta,
                mu0: args.mu0,
                sigma1: args.sigma1,
                sigma0: args.sigma0,
                rho: args.rho,
                n_seeds: args.runs / 2,
                master_seed: args.master_seed,
                metric_name: args.metric.clone(),
            }
        }
    };
    let data = generate(&spec)?;
    let mut file = RunFile::new(data.to_records());
    file.provenance = spec
        .provenance()
        .into_iter()
        .map(|(k, v)| (k, serde_json::Value::from(v)))
        .collect();
    let format = args.format.unwrap_or_else(|| {
        match args.out.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => FormatArg::Json,
            _ => FormatArg::Csv,
        }
    });
    let bytes = match format {
        FormatArg::Csv => file.to_csv(),
        FormatArg::Json => file.to_json(),
    };
    write_file(&args.out, &bytes)
}
