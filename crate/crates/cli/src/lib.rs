//! Command implementations behind the `decaysum` binary.
//!
//! Every command writes to a caller-supplied sink so the binary, the tests and
//! the acceptance harness share one code path.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use decaysum::bounds::{
    baseline_bounds, closed_form_upper, gaussian_sensitivity, gamma2_upper_bound,
};
use decaysum::evaluation::{
    coeff_gap_table, comparison_report, run_error_experiment, true_decaying_sums,
    window_column_norm_sq, ExperimentConfig,
};
use decaysum::mechanism::build_mechanism;
use decaysum::numeric::{derive_seed, fmt_f64};
use decaysum::{
    DecayFunction, MechanismKind, NormBounds, PrivacyParams, SigmaConvention, StreamDistribution,
};

/// Salt for the stream drawn by `run --distribution`.
const RUN_STREAM_SALT: u64 = 0x5354_5245_414d;
/// Salt for per-cell seeds in `bench`.
const BENCH_CELL_SALT: u64 = 0x0042_454e_4348;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Runtime(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    /// 2 for configuration problems, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Runtime(_) | Self::Io(_) => 1,
        }
    }
}

impl From<decaysum::Error> for CliError {
    fn from(e: decaysum::Error) -> Self {
        use decaysum::Error as E;
        match e {
            E::StreamExhausted(_) | E::NonFiniteInput(_) | E::Dimension { .. } => {
                Self::Runtime(e.to_string())
            }
            _ => Self::Config(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::Runtime(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "decaysum", version, about = "Private continual decaying sums via square-root Toeplitz factorization")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Square-root coefficients aₙ with the gap f(n+1)/2 − aₙ, as CSV.
    Coeffs(CoeffsArgs),
    /// γ₂ / γ_F bounds and their comparators, as JSON.
    Bounds(BoundsArgs),
    /// Run a mechanism over a stream, as CSV.
    Run(RunArgs),
    /// Error experiments over a mechanism × decay × horizon grid, as CSV.
    Bench(BenchArgs),
    /// Comparison report with every claimed ordering checked, as JSON.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CoeffsArgs {
    #[arg(long, value_parser = parse_decay)]
    pub decay: DecayFunction,
    /// Largest coefficient index; N + 1 rows are written.
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BoundsArgs {
    #[arg(long, value_parser = parse_decay)]
    pub decay: DecayFunction,
    #[arg(long)]
    pub horizon: usize,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct PrivacyArgs {
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Per-element bound Δ; inputs are clamped to [−Δ, Δ].
    #[arg(long, default_value_t = 1.0)]
    pub clip: f64,
    #[arg(long, default_value_t = SigmaConvention::MainText, value_parser = parse_convention)]
    pub sigma_convention: SigmaConvention,
    /// Disable noise entirely. Output is NOT private.
    #[arg(long)]
    pub unsafe_no_privacy: bool,
}

#[derive(Debug, Clone, Args)]
#[group(id = "source", required = true, multiple = false)]
pub struct SourceArgs {
    /// One value per line; `#` starts a comment.
    #[arg(long, group = "source")]
    pub input: Option<PathBuf>,
    #[arg(long, group = "source")]
    pub stdin: bool,
    /// all-ones, all-zero, uniform or rademacher; needs --horizon.
    #[arg(long, group = "source", value_parser = parse_distribution)]
    pub distribution: Option<StreamDistribution>,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long, value_parser = parse_decay)]
    pub decay: DecayFunction,
    /// Defaults to the stream length for file and stdin input.
    #[arg(long)]
    pub horizon: Option<usize>,
    #[arg(long, value_parser = parse_mechanism)]
    pub mechanism: Option<MechanismKind>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub privacy: PrivacyArgs,
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', value_parser = parse_mechanism, default_value = "factorization,gaussian")]
    pub mechanisms: Vec<MechanismKind>,
    /// Decay specs separated by spaces or repeated flags.
    #[arg(long = "decay", value_parser = parse_decay, required = true, num_args = 1..)]
    pub decays: Vec<DecayFunction>,
    #[arg(long = "horizon", value_delimiter = ',', required = true)]
    pub horizons: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, value_parser = parse_distribution, default_value = "uniform")]
    pub distribution: StreamDistribution,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub privacy: PrivacyArgs,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[arg(long, value_parser = parse_decay)]
    pub decay: DecayFunction,
    #[arg(long)]
    pub horizon: usize,
    #[command(flatten)]
    pub privacy: PrivacyArgs,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn parse_decay(s: &str) -> Result<DecayFunction, String> {
    s.parse().map_err(|e: decaysum::Error| e.to_string())
}

fn parse_mechanism(s: &str) -> Result<MechanismKind, String> {
    s.parse().map_err(|e: decaysum::Error| e.to_string())
}

fn parse_convention(s: &str) -> Result<SigmaConvention, String> {
    s.parse().map_err(|e: decaysum::Error| e.to_string())
}

fn parse_distribution(s: &str) -> Result<StreamDistribution, String> {
    s.parse().map_err(|e: decaysum::Error| e.to_string())
}

/// Where `run` reads its stream from.
#[derive(Debug, Clone, PartialEq)]
pub enum StreamSource {
    File(PathBuf),
    Stdin,
    Distribution(StreamDistribution),
}

/// Fully validated settings for `run`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub decay: DecayFunction,
    pub horizon: Option<usize>,
    pub mechanism: MechanismKind,
    pub privacy: PrivacyParams,
    pub seed: u64,
    pub source: StreamSource,
}

impl PrivacyArgs {
    /// ε and δ are mandatory unless noise is disabled, in which case they
    /// only need to be valid.
    pub fn resolve(&self) -> CliResult<PrivacyParams> {
        let (epsilon, delta) = match (self.epsilon, self.delta, self.unsafe_no_privacy) {
            (Some(e), Some(d), _) => (e, d),
            (e, d, true) => (e.unwrap_or(1.0), d.unwrap_or(1e-5)),
            _ => {
                return Err(CliError::Config(
                    "--epsilon and --delta are required for private runs".into(),
                ))
            }
        };
        let p = PrivacyParams::new(epsilon, delta, self.clip)?.with_convention(self.sigma_convention);
        Ok(if self.unsafe_no_privacy { p.unsafe_no_privacy() } else { p })
    }
}

fn require_seed(seed: Option<u64>, privacy: &PrivacyParams) -> CliResult<u64> {
    match seed {
        Some(s) => Ok(s),
        None if privacy.is_noiseless() => Ok(0),
        None => Err(CliError::Config("--seed is required for noisy commands".into())),
    }
}

impl RunConfig {
    pub fn from_args(args: &RunArgs) -> CliResult<Self> {
        let privacy = args.privacy.resolve()?;
        let seed = require_seed(args.seed, &privacy)?;
        let source = match (&args.source.input, args.source.stdin, args.source.distribution) {
            (Some(p), false, None) => StreamSource::File(p.clone()),
            (None, true, None) => StreamSource::Stdin,
            (None, false, Some(d)) => StreamSource::Distribution(d),
            _ => {
                return Err(CliError::Config(
                    "exactly one of --input, --stdin, --distribution is required".into(),
                ))
            }
        };
        if matches!(source, StreamSource::Distribution(_)) && args.horizon.is_none() {
            return Err(CliError::Config("--distribution needs --horizon".into()));
        }
        if args.horizon == Some(0) {
            return Err(CliError::Config("--horizon must be at least 1".into()));
        }
        Ok(Self {
            mechanism: args.mechanism.unwrap_or_else(|| MechanismKind::for_decay(&args.decay)),
            decay: args.decay.clone(),
            horizon: args.horizon,
            privacy,
            seed,
            source,
        })
    }
}

/// Parses one value per line; blank lines and `#` comments are skipped.
pub fn read_stream(reader: impl BufRead) -> CliResult<Vec<f64>> {
    let mut values = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let v: f64 = body
            .parse()
            .map_err(|e| CliError::Config(format!("line {}: cannot parse `{body}`: {e}", i + 1)))?;
        if !v.is_finite() {
            return Err(CliError::Config(format!("line {}: value must be finite", i + 1)));
        }
        values.push(v);
    }
    Ok(values)
}

/// What `run` did besides writing rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunSummary {
    pub steps: usize,
    pub clip_events: usize,
}

/// `t,x,private_output[,true_sum]`; `x` is the clamped value the mechanism
/// saw, and `true_sum` is written only when noise is disabled.
pub fn cmd_run(config: &RunConfig, stdin: &mut dyn BufRead, out: &mut dyn Write) -> CliResult<RunSummary> {
    let raw = match &config.source {
        StreamSource::File(path) => read_stream(BufReader::new(File::open(path).map_err(|e| {
            CliError::Config(format!("cannot open {}: {e}", path.display()))
        })?))?,
        StreamSource::Stdin => read_stream(stdin)?,
        StreamSource::Distribution(d) => {
            let horizon = config.horizon.expect("validated in RunConfig::from_args");
            d.sample(horizon, config.privacy.clip_bound(), derive_seed(config.seed, 0, RUN_STREAM_SALT))
        }
    };
    if raw.is_empty() {
        return Err(CliError::Config("the input stream is empty".into()));
    }
    let horizon = config.horizon.unwrap_or(raw.len());
    if raw.len() > horizon {
        return Err(CliError::Runtime(format!(
            "stream has {} values but the horizon is {horizon}",
            raw.len()
        )));
    }
    let mut mech = build_mechanism(config.mechanism, &config.decay, horizon, config.privacy, config.seed)?;
    let x: Vec<f64> = raw.iter().map(|v| config.privacy.clamp(*v).0).collect();
    let outputs = mech.run(&raw)?;
    let truth = config.privacy.is_noiseless().then(|| true_decaying_sums(&config.decay, &x));

    let mut w = io::BufWriter::new(out);
    match truth {
        Some(_) => writeln!(w, "t,x,private_output,true_sum")?,
        None => writeln!(w, "t,x,private_output")?,
    }
    for (t, (xv, o)) in x.iter().zip(&outputs).enumerate() {
        write!(w, "{},{},{}", t + 1, fmt_f64(*xv), fmt_f64(*o))?;
        if let Some(truth) = &truth {
            write!(w, ",{}", fmt_f64(truth[t]))?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(RunSummary {
        steps: outputs.len(),
        clip_events: mech.clip_events(),
    })
}

/// `n,a_n,half_weight,gap` for `n = 0..=N`; the `n = 0` row has no estimate.
pub fn cmd_coeffs(args: &CoeffsArgs, out: &mut dyn Write) -> CliResult<()> {
    let rows = coeff_gap_table(&args.decay, args.n)?;
    let mut w = io::BufWriter::new(out);
    writeln!(w, "n,a_n,half_weight,gap")?;
    writeln!(w, "0,{},,", fmt_f64(1.0))?;
    for r in rows {
        writeln!(w, "{},{},{},{}", r.n, fmt_f64(r.coeff), fmt_f64(r.half_weight), fmt_f64(r.gap))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsOutput {
    pub decay: String,
    pub horizon: usize,
    pub gamma2_lower: Option<f64>,
    pub gamma2_upper: f64,
    #[serde(rename = "gammaF_upper")]
    pub gamma_f_upper: f64,
    pub closed_form: Option<f64>,
    pub baseline: Option<f64>,
    pub gaussian_sensitivity: f64,
    /// Ordering checks from the comparison report, where one applies.
    pub orderings: Option<Vec<OrderingOutput>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderingOutput {
    pub claim: String,
    pub pass: bool,
}

pub fn compute_bounds(f: &DecayFunction, horizon: usize) -> CliResult<BoundsOutput> {
    if horizon == 0 {
        return Err(CliError::Config("--horizon must be at least 1".into()));
    }
    let sensitivity = gaussian_sensitivity(f, horizon);
    if let DecayFunction::SlidingWindow { w } = f {
        if *w > horizon {
            return Err(CliError::Config(format!("window {w} exceeds horizon {horizon}")));
        }
        let upper = window_column_norm_sq(*w)?;
        return Ok(BoundsOutput {
            decay: f.to_string(),
            horizon,
            gamma2_lower: None,
            gamma2_upper: upper,
            gamma_f_upper: (horizon as f64).sqrt() * upper,
            closed_form: None,
            baseline: None,
            gaussian_sensitivity: sensitivity,
            orderings: None,
        });
    }
    let nb = NormBounds::compute(f, horizon)?;
    debug_assert_eq!(nb.gamma2_upper, gamma2_upper_bound(f, horizon)?);
    let closed_form = closed_form_upper(f, horizon).ok();
    let baseline = baseline_bounds(f, horizon).ok();
    let orderings = if horizon >= 2 && closed_form.is_some() {
        let privacy = PrivacyParams::new(1.0, 1e-5, 1.0)?;
        let report = comparison_report(f, horizon, &privacy)?;
        Some(
            report
                .checks
                .into_iter()
                .map(|c| OrderingOutput { claim: c.claim, pass: c.pass })
                .collect(),
        )
    } else {
        None
    };
    Ok(BoundsOutput {
        decay: f.to_string(),
        horizon,
        gamma2_lower: Some(nb.gamma2_lower),
        gamma2_upper: nb.gamma2_upper,
        gamma_f_upper: nb.gamma_f_upper,
        closed_form,
        baseline,
        gaussian_sensitivity: sensitivity,
        orderings,
    })
}

pub fn cmd_bounds(args: &BoundsArgs, out: &mut dyn Write) -> CliResult<()> {
    let bounds = compute_bounds(&args.decay, args.horizon)?;
    serde_json::to_writer_pretty(&mut *out, &bounds)?;
    writeln!(out)?;
    Ok(())
}

pub fn cmd_compare(args: &CompareArgs, out: &mut dyn Write) -> CliResult<()> {
    let privacy = args.privacy.resolve()?;
    let report = comparison_report(&args.decay, args.horizon, &privacy)?;
    serde_json::to_writer_pretty(&mut *out, &report)?;
    writeln!(out)?;
    Ok(())
}

fn compatible(kind: MechanismKind, f: &DecayFunction) -> bool {
    match kind {
        MechanismKind::Factorization => !f.is_window(),
        MechanismKind::SlidingWindow => f.is_window(),
        MechanismKind::GaussianBaseline => true,
    }
}

pub const BENCH_HEADER: &str =
    "mechanism,decay,horizon,trials,empirical_linf,empirical_l22,bound_linf,bound_l22";

/// One row per compatible (mechanism, decay, horizon) cell, in grid order.
pub fn cmd_bench(args: &BenchArgs, out: &mut dyn Write) -> CliResult<()> {
    let privacy = args.privacy.resolve()?;
    let seed = require_seed(args.seed, &privacy)?;
    if args.trials == 0 {
        return Err(CliError::Config("--trials must be at least 1".into()));
    }
    let mut cells = Vec::new();
    for &kind in &args.mechanisms {
        for f in &args.decays {
            for &horizon in &args.horizons {
                if compatible(kind, f) {
                    cells.push(ExperimentConfig {
                        mechanism: kind,
                        decay: f.clone(),
                        horizon,
                        privacy,
                        trials: args.trials,
                        distribution: args.distribution,
                        seed: derive_seed(seed, cells.len() as u64, BENCH_CELL_SALT),
                    });
                }
            }
        }
    }
    if cells.is_empty() {
        return Err(CliError::Config("no compatible mechanism/decay pairs in the grid".into()));
    }
    let reports = cells
        .par_iter()
        .map(run_error_experiment)
        .collect::<Result<Vec<_>, _>>()?;
    let mut w = io::BufWriter::new(out);
    writeln!(w, "{BENCH_HEADER}")?;
    for r in reports {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            r.mechanism,
            r.decay,
            r.horizon,
            r.trials,
            fmt_f64(r.empirical_linf),
            fmt_f64(r.empirical_l22),
            fmt_f64(r.bound_linf),
            fmt_f64(r.bound_l22)
        )?;
    }
    w.flush()?;
    Ok(())
}

fn open_output(path: &Option<PathBuf>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p).map_err(|e| {
            CliError::Config(format!("cannot create {}: {e}", p.display()))
        })?),
        None => Box::new(io::stdout().lock()),
    })
}

/// Runs a parsed command against the process's stdio.
pub fn execute(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Coeffs(args) => cmd_coeffs(&args, &mut open_output(&args.output)?),
        Command::Bounds(args) => cmd_bounds(&args, &mut open_output(&args.output)?),
        Command::Compare(args) => cmd_compare(&args, &mut open_output(&args.output)?),
        Command::Bench(args) => cmd_bench(&args, &mut open_output(&args.output)?),
        Command::Run(args) => {
            let config = RunConfig::from_args(&args)?;
            let mut out = open_output(&args.output)?;
            let summary = cmd_run(&config, &mut io::stdin().lock(), &mut out)?;
            if summary.clip_events > 0 {
                eprintln!(
                    "warning: {} value(s) clamped to [-{c}, {c}]",
                    summary.clip_events,
                    c = config.privacy.clip_bound()
                );
            }
            if config.privacy.is_noiseless() {
                eprintln!("warning: --unsafe-no-privacy is set; the output is not private");
            }
            Ok(())
        }
    }
}
