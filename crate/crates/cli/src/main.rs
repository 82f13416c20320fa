//! `hilbert-ar`: generate benchmark series, fit single models and run the
//! sliding-window evaluation.
//!
//! Exit status is 0 on success, 2 for usage or configuration errors and 1
//! for runtime failures. Relative output paths are resolved against
//! `HILBERT_AR_OUT_DIR` when it is set.

mod config_file;
mod dataset;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hilbert_ar::datagen::{write_column, LorenzParams, MackeyGlassParams};
use hilbert_ar::eval::{fit_forecast, Summary};
use hilbert_ar::kam::fit_kam;
use hilbert_ar::kem::fit_kem;
use hilbert_ar::linear::{fit_linear_ar_with, LinearArModel, MomentEstimator};
use hilbert_ar::preimage::PreimageSettings;
use hilbert_ar::{
    bandwidth_from_median, run_outer_evaluation_with, Error, EvalConfig, KernelConfig, Method, Parallelism,
};
use serde::Serialize;

use config_file::ConfigFile;
use dataset::{Dataset, Generators};

pub const OUT_DIR_ENV: &str = "HILBERT_AR_OUT_DIR";

const DEFAULT_W: usize = 100;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidConfig(_) => CliError::Usage(e.to_string()),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "hilbert-ar", version, about = "Linear and kernel autoregressive forecasting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a benchmark series, one value per line.
    Generate {
        /// mg<tau> (e.g. mg30) or lorenz-x, lorenz-y, lorenz-z.
        #[arg(long)]
        dataset: Dataset,
        #[arg(long, default_value_t = 1000)]
        length: usize,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// TOML file with `[mackey_glass]` / `[lorenz]` generator settings.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Fit one model on a series and forecast the next value.
    Fit(FitArgs),
    /// Sliding-window one-step-ahead evaluation.
    Evaluate(EvalArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Lar,
    Kam,
    Kem,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Lar => Method::Lar,
            MethodArg::Kam => Method::Kam,
            MethodArg::Kem => Method::Kem,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EstimatorArg {
    CommonRange,
    BiasedCentered,
}

impl From<EstimatorArg> for MomentEstimator {
    fn from(e: EstimatorArg) -> Self {
        match e {
            EstimatorArg::CommonRange => MomentEstimator::CommonRange,
            EstimatorArg::BiasedCentered => MomentEstimator::BiasedCentered,
        }
    }
}

#[derive(Args)]
struct SourceArgs {
    /// mg<tau>, lorenz-x|y|z, or csv:<path>.
    #[arg(long)]
    dataset: Option<Dataset>,
    /// Samples to generate for synthetic datasets.
    #[arg(long)]
    length: Option<usize>,
    /// Zero-based CSV column.
    #[arg(long)]
    column: Option<usize>,
    /// Keep only the first N values of a CSV file.
    #[arg(long)]
    take: Option<usize>,
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, value_enum)]
    method: MethodArg,
    #[arg(long)]
    p: usize,
    /// Kernel bandwidth.
    #[arg(long, conflicts_with = "lp")]
    ell: Option<f64>,
    /// Bandwidth as a multiple of the series median.
    #[arg(long)]
    lp: Option<f64>,
    /// Yule-Walker moment estimator for LAR [default: biased-centered].
    #[arg(long, value_enum)]
    estimator: Option<EstimatorArg>,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// TOML file with defaults for any of these options.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Forecasting method [default: kem].
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    /// Training window length, even [default: 100].
    #[arg(long)]
    w: Option<usize>,
    /// Outer frames to evaluate; defaults to all the series allows.
    #[arg(long)]
    steps: Option<usize>,
    /// Candidate orders, comma separated [default: 1,2,3,4,5].
    #[arg(long, value_delimiter = ',')]
    p_grid: Option<Vec<usize>>,
    /// Bandwidth percentages of the window median [default: 0.01,0.1,0.5,1,2,5].
    #[arg(long, value_delimiter = ',')]
    lp_grid: Option<Vec<f64>>,
    /// Report the IQR-trimmed MSE as the headline figure.
    #[arg(long)]
    trim: bool,
    /// Worker threads; 1 runs sequentially, 0 uses all cores.
    #[arg(long)]
    jobs: Option<usize>,
    /// Yule-Walker moment estimator for LAR [default: biased-centered].
    #[arg(long, value_enum)]
    estimator: Option<EstimatorArg>,
    /// JSON summary path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-step CSV path.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Truth/prediction CSV for plotting.
    #[arg(long)]
    plot_csv: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate {
            dataset,
            length,
            out,
            config,
        } => generate(&dataset, length, out.as_deref(), config.as_deref()),
        Command::Fit(args) => fit(args),
        Command::Evaluate(args) => evaluate(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn resolve_out(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn write_text(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => {
            let p = resolve_out(p);
            std::fs::write(&p, text).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", p.display())))
        }
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Runtime(e.to_string())),
    }
}

fn read_config(path: Option<&Path>) -> Result<ConfigFile, CliError> {
    path.map(ConfigFile::read).transpose().map(Option::unwrap_or_default)
}

fn generate(dataset: &Dataset, length: usize, out: Option<&Path>, config: Option<&Path>) -> Result<(), CliError> {
    if !dataset.is_generated() {
        return Err(CliError::Usage("generate needs a synthetic dataset".into()));
    }
    if length == 0 {
        return Err(CliError::Usage("length must be positive".into()));
    }
    let series = dataset.load(length, 0, None, &read_config(config)?.generators())?;
    match out {
        Some(p) => Ok(write_column(resolve_out(p), series.values())?),
        None => {
            let text: String = series.values().iter().map(|v| format!("{v}\n")).collect();
            write_text(None, &text)
        }
    }
}

#[derive(Serialize)]
struct FitOutput {
    series: String,
    method: Method,
    p: usize,
    ell: Option<f64>,
    coefficients: Vec<f64>,
    /// Linear models only.
    mean: Option<f64>,
    forecast: f64,
    converged: bool,
}

fn fit(args: FitArgs) -> Result<(), CliError> {
    let dataset = args
        .source
        .dataset
        .ok_or_else(|| CliError::Usage("--dataset is required".into()))?;
    let series = dataset.load(
        args.source.length.unwrap_or(1000),
        args.source.column.unwrap_or(0),
        args.source.take,
        &Generators::default(),
    )?;
    let method = Method::from(args.method);
    let values = series.values();
    let settings = PreimageSettings::default();
    let estimator = args.estimator.map(MomentEstimator::from).unwrap_or_default();

    let ell = match (method, args.ell, args.lp) {
        (Method::Lar, _, _) => None,
        (_, Some(ell), _) => Some(ell),
        (_, None, Some(lp)) => Some(bandwidth_from_median(values, lp)?),
        (_, None, None) => return Err(CliError::Usage("kernel methods need --ell or --lp".into())),
    };
    let kernel = ell.map(KernelConfig::squared_exponential).transpose()?;

    let (coefficients, mean) = match method {
        Method::Lar => match fit_linear_ar_with(values, args.p, estimator) {
            Ok(m) => (m.coefficients().to_vec(), Some(m.mean())),
            Err(Error::NearSingularSystem { fallback, .. }) => {
                log::warn!("singular Yule-Walker system; reporting minimum-norm coefficients");
                let m = LinearArModel::from_coefficients(fallback, 0.0)?;
                let mean = fit_mean(values, estimator);
                (m.coefficients().to_vec(), Some(mean))
            }
            Err(e) => return Err(e.into()),
        },
        Method::Kam => match fit_kam(&series, args.p, kernel.expect("kernel set")) {
            Ok(m) => (m.coefficients().to_vec(), None),
            Err(Error::NearSingularSystem { fallback, .. }) => {
                log::warn!("singular KAM system; reporting minimum-norm coefficients");
                (fallback, None)
            }
            Err(e) => return Err(e.into()),
        },
        Method::Kem => {
            let m = fit_kem(&series, args.p, kernel.expect("kernel set"))?;
            if let Some(c) = m.condition_warning() {
                log::warn!("KEM system rank {}/{}, condition {c:e}", m.rank(), args.p);
            }
            (m.coefficients().to_vec(), None)
        }
    };
    let forecast = fit_forecast(method, values, args.p, kernel, estimator, &settings)?;
    let out = FitOutput {
        series: series.name().to_string(),
        method,
        p: args.p,
        ell,
        coefficients,
        mean,
        forecast: forecast.prediction,
        converged: forecast.converged,
    };
    let text = serde_json::to_string_pretty(&out).map_err(|e| CliError::Runtime(e.to_string()))?;
    write_text(None, &(text + "\n"))
}

fn fit_mean(values: &[f64], estimator: MomentEstimator) -> f64 {
    match estimator {
        MomentEstimator::BiasedCentered => values.iter().sum::<f64>() / values.len() as f64,
        MomentEstimator::CommonRange => 0.0,
    }
}

#[derive(Serialize)]
struct EvalOutput<'a> {
    dataset: String,
    length: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    mackey_glass: Option<MackeyGlassParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lorenz: Option<&'a LorenzParams>,
    /// Contents of `--config`, as parsed.
    #[serde(skip_serializing_if = "Option::is_none")]
    config_file: Option<&'a ConfigFile>,
    summary: &'a Summary,
}

fn evaluate(args: EvalArgs) -> Result<(), CliError> {
    let file = read_config(args.config.as_deref())?;
    let dataset: Dataset = match (args.source.dataset, &file.dataset) {
        (Some(d), _) => d,
        (None, Some(s)) => s.parse().map_err(CliError::Usage)?,
        (None, None) => return Err(CliError::Usage("--dataset is required".into())),
    };
    let method = args.method.map(Method::from).or(file.method).unwrap_or(Method::Kem);
    let w = args.w.or(file.w).unwrap_or(DEFAULT_W);

    let mut cfg = EvalConfig::new(method, w);
    cfg.steps = args.steps.or(file.steps);
    if let Some(g) = args.p_grid.or(file.p_grid.clone()) {
        cfg.p_grid = g;
    }
    if let Some(g) = args.lp_grid.or(file.lp_grid.clone()) {
        cfg.lp_grid = g;
    }
    cfg.trim_iqr = args.trim || file.trim.unwrap_or(false);
    if let Some(e) = args.estimator.map(MomentEstimator::from).or(file.estimator) {
        cfg.linear_estimator = e;
    }
    if let Some(p) = &file.preimage {
        cfg.preimage = PreimageSettings {
            max_iterations: p.max_iterations.unwrap_or(cfg.preimage.max_iterations),
            tolerance: p.tolerance.unwrap_or(cfg.preimage.tolerance),
            denominator_floor: p.denominator_floor.unwrap_or(cfg.preimage.denominator_floor),
            initializer: p.initializer.unwrap_or(cfg.preimage.initializer),
        };
    }
    cfg.validate()?;

    let length = args
        .source
        .length
        .or(file.length)
        .unwrap_or_else(|| w + cfg.steps.unwrap_or(1000));
    let column = args.source.column.or(file.column).unwrap_or(0);
    let take = args.source.take.or(file.take);
    let gens = file.generators();
    let series = dataset.load(length, column, take, &gens)?;
    let jobs = args.jobs.or(file.jobs);
    log::info!("evaluating {} on {} samples, jobs {:?}", method, series.len(), jobs);

    let report = run_outer_evaluation_with(&series, &cfg, Parallelism::from_jobs(jobs))?;
    if let Some(p) = &args.csv {
        report.save_steps_csv(&resolve_out(p))?;
    }
    if let Some(p) = &args.plot_csv {
        report.save_plot_csv(&resolve_out(p))?;
    }
    let summary = report.summary();
    let out = EvalOutput {
        dataset: series.name().to_string(),
        length: series.len(),
        mackey_glass: matches!(dataset, Dataset::MackeyGlass { .. }).then(|| gens.mackey_glass_for(&dataset)),
        lorenz: matches!(dataset, Dataset::Lorenz(_)).then_some(&gens.lorenz),
        config_file: args.config.is_some().then_some(&file),
        summary: &summary,
    };
    let text = serde_json::to_string_pretty(&out).map_err(|e| CliError::Runtime(e.to_string()))?;
    write_text(args.out.as_deref(), &(text + "\n"))?;
    if report.records.is_empty() {
        return Err(CliError::Runtime("every outer frame failed".into()));
    }
    Ok(())
}
