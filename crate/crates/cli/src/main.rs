//! `idetect`: change-point detection from the command line.

mod input;
mod render;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use idetect_core::sim::{
    add_noise, aggregate, generate_signal, model_spec, run_replication, BenchPipeline, NoiseDist,
};
use idetect_core::{
    default_config, detect, segment_fit, solution_path_report, DetectorConfig, Error, Sigma,
    SignalClass, StoppingRule, TimeSeries,
};
use rayon::prelude::*;
use serde::Serialize;

use render::Format;

/// Environment variable holding the worker-thread count of `bench`.
const THREADS_ENV: &str = "IDETECT_THREADS";

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or malformed input, or an invalid flag value.
    Input(String),
    Core(Error),
    /// The requested model size does not exist on the path.
    NoSuchModel {
        at: usize,
        max: usize,
    },
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(msg) => f.write_str(msg),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::NoSuchModel { at, max } => {
                write!(f, "--at {at} exceeds the path length {max}")
            }
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    /// 2 for bad input or flags, 1 when the computation itself cannot finish.
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::NoSuchModel { .. } => 1,
            CliError::Core(e) => match e {
                Error::EmptyInput
                | Error::NonFiniteValue { .. }
                | Error::UnknownModel(_)
                | Error::InvalidConfig(_)
                | Error::BadLambda { .. }
                | Error::BadScale { .. }
                | Error::BadDof(_) => 2,
                _ => 1,
            },
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "idetect",
    version,
    about = "Detect change-points in the mean or slope of a series"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Detect change-points in a series.
    Detect(DetectArgs),
    /// Print the solution path and the score of every nested model.
    Path(PathArgs),
    /// Write a noisy realization of a named test signal.
    Simulate(SimulateArgs),
    /// Monte-Carlo accuracy and timing table for a named test signal.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Window {
    Auto,
    Off,
}

#[derive(Debug, Args)]
struct SeriesArgs {
    /// Input file with one value per line, or `-` for standard input.
    input: PathBuf,
    /// Read this CSV column (header name or 1-based number) instead.
    #[arg(long)]
    column: Option<String>,
    /// Signal class: `pcm` (level shifts) or `cplm` (slope changes).
    #[arg(long, default_value = "pcm")]
    class: SignalClass,
    /// Expansion step of the interval grid.
    #[arg(long)]
    lambda: Option<usize>,
    /// Noise level: `auto` (MAD estimate) or a positive number.
    #[arg(long, default_value = "auto")]
    sigma: Sigma,
    /// Split long series into windows (`auto`) or never (`off`).
    #[arg(long, value_enum, default_value_t = Window::Auto)]
    window: Window,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the output here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl SeriesArgs {
    fn config(&self) -> DetectorConfig {
        let mut config = default_config(self.class);
        config.sigma = self.sigma;
        if let Some(l) = self.lambda {
            config.lambda = l;
        }
        if self.window == Window::Off {
            config.window_len = usize::MAX;
            config.window_trigger = usize::MAX;
        }
        config
    }

    fn read(&self) -> Result<TimeSeries, CliError> {
        let values = input::read_series(&self.input, self.column.as_deref())?;
        Ok(TimeSeries::new(values)?)
    }
}

#[derive(Debug, Args)]
struct DetectArgs {
    #[command(flatten)]
    series: SeriesArgs,
    /// Stopping rule.
    #[arg(long = "stop", default_value = "hybrid")]
    stop: StoppingRule,
    /// Threshold constant (default 1 for pcm, 1.4 for cplm).
    #[arg(long = "const")]
    constant: Option<f64>,
    /// Block-averaging scale for heavy-tailed noise; 1 disables it.
    #[arg(long, default_value_t = 1)]
    scale: usize,
    /// Accepted for symmetry with `simulate`; detection is deterministic.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct PathArgs {
    #[command(flatten)]
    series: SeriesArgs,
    /// Over-detection threshold constant (default 0.9 for pcm, 1.25 for cplm).
    #[arg(long = "const")]
    constant: Option<f64>,
    /// Refit the model with this many change-points (default: best score).
    #[arg(long)]
    at: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DataFormat {
    /// One value per line.
    Lines,
    /// `t,x,f` with a header row.
    Csv,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Model name, e.g. M2 or W1.
    #[arg(long)]
    model: String,
    #[arg(long)]
    seed: u64,
    /// Noise: `gaussian` or `t<dof>` such as `t5`.
    #[arg(long, default_value = "gaussian")]
    dist: NoiseDist,
    /// Also write the noiseless signal and the true change-points as JSON.
    #[arg(long)]
    truth: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = DataFormat::Lines)]
    format: DataFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BenchFormat {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long)]
    model: String,
    #[arg(long, default_value_t = 100)]
    reps: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value = "gaussian")]
    dist: NoiseDist,
    /// Stopping rule of a compared pipeline; repeat to add rows.
    #[arg(long = "pipeline", default_value = "hybrid")]
    pipelines: Vec<StoppingRule>,
    /// Block-averaging scale applied to every pipeline.
    #[arg(long, default_value_t = 1)]
    scale: usize,
    /// Leave out the timing column so the output is reproducible.
    #[arg(long)]
    no_timing: bool,
    #[arg(long, value_enum, default_value_t = BenchFormat::Table)]
    format: BenchFormat,
    /// Also write the CSV report here.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Input(format!("writing {}: {e}", path.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Input(format!("writing standard output: {e}"))),
    }
}

fn run_detect(args: &DetectArgs) -> Result<(), CliError> {
    let mut config = args.series.config();
    config.stopping = args.stop;
    config.ht_scale = args.scale;
    if let Some(c) = args.constant {
        config.threshold_const = c;
    }
    config.validate()?;
    let series = args.series.read()?;
    let res = detect(&series, &config)?;
    emit(
        args.series.out.as_deref(),
        &render::detection(&res, series.values(), args.series.format),
    )
}

fn run_path(args: &PathArgs) -> Result<(), CliError> {
    let mut config = args.series.config();
    if args.series.lambda.is_none() {
        config.lambda = config.hybrid_lambda;
    }
    if let Some(c) = args.constant {
        config.path_threshold_const = c;
    }
    config.validate()?;
    let series = args.series.read()?;
    let report = solution_path_report(&series, &config)?;
    let at = args.at.unwrap_or(report.n_hat);
    if at > report.path.len() {
        return Err(CliError::NoSuchModel {
            at,
            max: report.path.len(),
        });
    }
    let change_points = report.path.model(at);
    let fitted = segment_fit(&series, &change_points, config.class)?;
    let out = render::PathOutput {
        report: &report,
        at,
        change_points,
        fitted,
    };
    emit(
        args.series.out.as_deref(),
        &render::path(&out, series.values(), args.series.format),
    )
}

#[derive(Serialize)]
struct Truth<'a> {
    model: &'a str,
    len: usize,
    class: SignalClass,
    sigma: f64,
    change_points: &'a [usize],
    signal: &'a [f64],
}

fn run_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let spec = model_spec(&args.model)?;
    let signal = generate_signal(&spec);
    let series = add_noise(&signal, spec.sigma, args.dist, args.seed)?;
    let mut text = String::new();
    match args.format {
        DataFormat::Lines => {
            for v in series.values() {
                text.push_str(&format!("{v}\n"));
            }
        }
        DataFormat::Csv => {
            text.push_str("t,x,f\n");
            for (i, (v, f)) in series.values().iter().zip(&signal).enumerate() {
                text.push_str(&format!("{},{v},{f}\n", i + 1));
            }
        }
    }
    emit(args.out.as_deref(), &text)?;
    if let Some(path) = &args.truth {
        let truth = Truth {
            model: &spec.name,
            len: spec.len,
            class: spec.class,
            sigma: spec.sigma,
            change_points: &spec.true_cps,
            signal: &signal,
        };
        emit(Some(path), &render::json(&truth))?;
    }
    Ok(())
}

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var(THREADS_ENV) {
        let n: usize = raw.trim().parse().map_err(|_| {
            CliError::Input(format!("{THREADS_ENV} must be a thread count, got `{raw}`"))
        })?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| CliError::Input(format!("thread pool: {e}")))
}

fn run_bench(args: &BenchArgs) -> Result<(), CliError> {
    let spec = model_spec(&args.model)?;
    let pipelines: Vec<BenchPipeline> = args
        .pipelines
        .iter()
        .map(|&stop| BenchPipeline::standard(spec.class, stop, args.scale))
        .collect();
    for p in &pipelines {
        p.config.validate()?;
    }
    if args.scale > spec.len {
        return Err(Error::BadScale {
            scale: args.scale,
            len: spec.len,
        }
        .into());
    }
    let signal = generate_signal(&spec);
    let outcomes = thread_pool()?.install(|| {
        (0..args.reps as u64)
            .into_par_iter()
            .map(|rep| run_replication(&spec, &signal, rep, args.dist, args.seed, &pipelines))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let report = aggregate(&spec, args.dist, args.seed, &pipelines, outcomes.concat());
    let timing = !args.no_timing;
    if let Some(path) = &args.csv {
        emit(Some(path), &report.to_csv(timing))?;
    }
    let text = match args.format {
        BenchFormat::Table => report.to_table(timing),
        BenchFormat::Csv => report.to_csv(timing),
        BenchFormat::Json => render::json(&report),
    };
    emit(args.out.as_deref(), &text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Detect(a) => run_detect(a),
        Command::Path(a) => run_path(a),
        Command::Simulate(a) => run_simulate(a),
        Command::Bench(a) => run_bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("idetect: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
