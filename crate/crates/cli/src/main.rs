//! Command-line interface: simulate, train, predict, evaluate, bench.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use hawkes_horizon::baselines::{RppFitConfig, SeismicConfig};
use hawkes_horizon::estimators::{AlphaEstimator, AlphaMethod};
use hawkes_horizon::eval::{
    bench_prediction_cost, run_experiment, timing_csv, BenchConfig, ExperimentConfig, ModelKind,
};
use hawkes_horizon::forecast::{Aggregation, FeatureConfig, ForecastModel, ItemState, ModelConfig};
use hawkes_horizon::io::{load_dataset, load_model, load_toml, save_dataset, save_model};
use hawkes_horizon::sim::{simulate_batch, BatchConfig};
use hawkes_horizon::time::{parse_duration, parse_horizon_list};
use hawkes_horizon::Horizon;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "hawkes-horizon", version, about = "Hawkes-process popularity forecasts over arbitrary horizons")]
struct Cli {
    /// Caps the number of worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Table,
    Records,
}

#[derive(Clone, Copy, ValueEnum)]
enum AggregationArg {
    Single,
    Arithmetic,
    Geometric,
}

impl From<AggregationArg> for Aggregation {
    fn from(a: AggregationArg) -> Self {
        match a {
            AggregationArg::Single => Aggregation::Single,
            AggregationArg::Arithmetic => Aggregation::Arithmetic,
            AggregationArg::Geometric => Aggregation::Geometric,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Simulates a synthetic cascade dataset.
    Simulate {
        /// TOML batch configuration; defaults are used when absent.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the number of items.
        #[arg(long)]
        items: Option<usize>,
    },
    /// Trains a forecast model.
    Train {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        model_out: PathBuf,
        /// TOML model configuration; command-line flags override it.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        horizons: Option<String>,
        #[arg(long, value_enum)]
        aggregation: Option<AggregationArg>,
        /// `mean`, `median`, or `quantile:<gamma>`.
        #[arg(long)]
        alpha_estimator: Option<String>,
        /// Velocity window; sized from the data when absent.
        #[arg(long)]
        window: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Predicts the count of every item at `at + horizon`.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// Prediction time since item creation.
        #[arg(long)]
        at: String,
        /// Horizon length or `inf`.
        #[arg(long)]
        horizon: String,
        #[arg(long, value_enum, default_value = "table")]
        format: OutputFormat,
    },
    /// Trains a model roster and evaluates it over a horizon grid.
    Evaluate {
        #[arg(long)]
        data: PathBuf,
        /// TOML experiment configuration.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        models: Option<String>,
        #[arg(long)]
        horizons: Option<String>,
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Measures prediction cost across observed cascade sizes.
    Bench {
        #[arg(long, default_value = "hwk,seismic,rpp")]
        models: String,
        #[arg(long, default_value = "1e2,1e3,1e4,1e5,1e6")]
        sizes: String,
        /// Trained model for HWK timings; a small one is trained when absent.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        rounds: Option<usize>,
        #[arg(long)]
        report: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn parse_models(s: &str) -> Result<Vec<ModelKind>> {
    s.split(',').filter(|p| !p.trim().is_empty()).map(|p| Ok(p.parse::<ModelKind>()?)).collect()
}

fn parse_sizes(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|p| {
            let v: f64 = p.trim().parse().with_context(|| format!("bad size '{p}'"))?;
            if !(v >= 1.0 && v.fract() == 0.0) {
                bail!("sizes must be positive integers, got '{p}'");
            }
            Ok(v as usize)
        })
        .collect()
}

fn parse_alpha_estimator(s: &str) -> Result<AlphaEstimator> {
    let method = match s.trim() {
        "mean" => AlphaMethod::Mean,
        "median" => AlphaMethod::Quantile { gamma: 0.5 },
        other => match other.strip_prefix("quantile:") {
            Some(g) => AlphaMethod::Quantile { gamma: g.parse().with_context(|| format!("bad quantile level '{g}'"))? },
            None => bail!("unknown alpha estimator '{other}' (expected mean, median or quantile:<gamma>)"),
        },
    };
    Ok(AlphaEstimator { method, ..Default::default() })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)?).with_context(|| format!("writing {}", path.display()))
}

fn simulate(config: Option<PathBuf>, out: PathBuf, seed: Option<u64>, items: Option<usize>) -> Result<()> {
    let mut cfg: BatchConfig = match config {
        Some(p) => load_toml(&p)?,
        None => BatchConfig::default(),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(n) = items {
        cfg.n_items = n;
    }
    let batch = simulate_batch(&cfg)?;
    save_dataset(&out, &batch.cascades)?;
    let events: usize = batch.cascades.iter().map(|c| c.len()).sum();
    let truncated = batch.cascades.iter().filter(|c| c.truncated).count();
    eprintln!("wrote {} items ({events} events, {truncated} truncated) to {}", batch.cascades.len(), out.display());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn train(
    data: PathBuf,
    model_out: PathBuf,
    config: Option<PathBuf>,
    horizons: Option<String>,
    aggregation: Option<AggregationArg>,
    alpha_estimator: Option<String>,
    window: Option<String>,
    seed: u64,
) -> Result<()> {
    let mut cfg: ModelConfig = match config {
        Some(p) => load_toml(&p)?,
        None => ModelConfig::default(),
    };
    if let Some(h) = horizons {
        cfg.horizons = parse_horizon_list(&h)?;
    }
    if let Some(a) = aggregation {
        cfg.aggregation = a.into();
    }
    if let Some(a) = alpha_estimator {
        cfg.alpha_label = parse_alpha_estimator(&a)?;
    }
    cfg.sampling.seed = seed;
    cfg.gbdt.seed = seed;
    let dataset = load_dataset(&data)?;
    let features = match window {
        Some(w) => FeatureConfig::new(parse_duration(&w)?),
        None => FeatureConfig::for_dataset(&dataset.cascades)?,
    };
    let (model, set) = ForecastModel::train(&dataset.cascades, &features, &cfg)?;
    save_model(&model_out, &model)?;
    eprintln!(
        "trained on {} examples ({} dropped for coverage, {} for the growth label); model written to {}",
        set.examples.len(),
        set.dropped_truncated,
        set.dropped_alpha,
        model_out.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct PredictionRecord<'a> {
    item_id: &'a str,
    at: f64,
    horizon: Horizon,
    count: f64,
    prediction: f64,
}

fn predict(model: PathBuf, data: PathBuf, at: String, horizon: String, format: OutputFormat) -> Result<()> {
    let model = load_model(&model)?;
    let dataset = load_dataset(&data)?;
    let s = parse_duration(&at)?;
    let delta: Horizon = horizon.parse()?;
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    if let OutputFormat::Table = format {
        writeln!(out, "{:<24} {:>10} {:>14}", "item_id", "count", "prediction")?;
    }
    for c in &dataset.cascades {
        let state = ItemState::from_history(&model.schema.config, c, s)?;
        let n_s = state.count() as f64;
        let p = model.predict(&state.features(s), n_s, delta)?;
        match format {
            OutputFormat::Table => writeln!(out, "{:<24} {:>10} {:>14.3}", c.item_id, n_s, p)?,
            OutputFormat::Records => {
                let rec = PredictionRecord { item_id: &c.item_id, at: s, horizon: delta, count: n_s, prediction: p };
                serde_json::to_writer(&mut out, &rec)?;
                writeln!(out)?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn evaluate(
    data: PathBuf,
    config: Option<PathBuf>,
    models: Option<String>,
    horizons: Option<String>,
    report: PathBuf,
    seed: Option<u64>,
) -> Result<()> {
    let mut cfg: ExperimentConfig = match config {
        Some(p) => load_toml(&p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(m) = models {
        cfg.models = parse_models(&m)?;
    }
    if let Some(h) = horizons {
        cfg.horizons = parse_horizon_list(&h)?;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let dataset = load_dataset(&data)?;
    let exp = run_experiment(&dataset.cascades, &cfg)?;
    exp.report.write_dir(&report)?;
    print!("{}", exp.report.render_table());
    Ok(())
}

fn bench(
    models: String,
    sizes: String,
    model: Option<PathBuf>,
    rounds: Option<usize>,
    report: PathBuf,
    seed: u64,
) -> Result<()> {
    let kinds = parse_models(&models)?;
    let mut cfg = BenchConfig { sizes: parse_sizes(&sizes)?, seed, ..Default::default() };
    if let Some(r) = rounds {
        cfg.rounds = r;
    }
    let hwk = if kinds.contains(&ModelKind::Hwk) {
        Some(match model {
            Some(p) => load_model(&p)?,
            None => {
                let batch = simulate_batch(&BatchConfig { n_items: 300, seed, ..Default::default() })?;
                let features = FeatureConfig::for_dataset(&batch.cascades)?;
                let mut mc = ModelConfig::default();
                mc.sampling.seed = seed;
                mc.gbdt.seed = seed;
                ForecastModel::train(&batch.cascades, &features, &mc)?.0
            }
        })
    } else {
        None
    };
    let rows = bench_prediction_cost(&kinds, hwk.as_ref(), &SeismicConfig::default(), &RppFitConfig::default(), &cfg)?;
    fs::create_dir_all(&report)?;
    fs::write(report.join("timing.csv"), timing_csv(&rows)?)?;
    write_json(&report.join("timing.json"), &rows)?;
    println!("{:<10} {:>10} {:>8} {:>14} {:>14}", "model", "size", "samples", "mean (ms)", "median (ms)");
    for r in &rows {
        println!("{:<10} {:>10} {:>8} {:>14.6} {:>14.6}", r.model, r.size, r.samples, r.mean_secs * 1e3, r.median_secs * 1e3);
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring the thread pool")?;
    }
    match cli.command {
        Command::Simulate { config, out, seed, items } => simulate(config, out, seed, items),
        Command::Train { data, model_out, config, horizons, aggregation, alpha_estimator, window, seed } => {
            train(data, model_out, config, horizons, aggregation, alpha_estimator, window, seed)
        }
        Command::Predict { model, data, at, horizon, format } => predict(model, data, at, horizon, format),
        Command::Evaluate { data, config, models, horizons, report, seed } => {
            evaluate(data, config, models, horizons, report, seed)
        }
        Command::Bench { models, sizes, model, rounds, report, seed } => bench(models, sizes, model, rounds, report, seed),
    }
}

/// Stable error class for the one-line error message.
fn error_class(err: &anyhow::Error) -> &'static str {
    if let Some(e) = err.downcast_ref::<hawkes_horizon::Error>() {
        return e.class();
    }
    if err.downcast_ref::<io::Error>().is_some() {
        return "io";
    }
    if err.downcast_ref::<serde_json::Error>().is_some() {
        return "serialization";
    }
    "usage"
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let msg = format!("{err:#}").replace('\n', " ");
            eprintln!("error[{}]: {msg}", error_class(&err));
            ExitCode::from(2)
        }
    }
}
