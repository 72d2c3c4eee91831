//! Prediction-cost microbenchmark across observed cascade sizes.
//!
//! Sizes are measured in interleaved rounds so that slow drift (frequency
//! scaling, other load) spreads over all sizes. Each sample times a batch of
//! calls sized during warmup and reports the per-call time. CPU pinning is
//! not attempted.

use std::hint::black_box;
use std::time::Instant;

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::baselines::{rpp_fit, seismic_predict, RppFitConfig, SeismicConfig};
use crate::cascade::{Cascade, Event};
use crate::error::{Error, Result};
use crate::eval::experiment::{ModelKind, RPP_NAME, SEISMIC_NAME};
use crate::eval::metrics::median;
use crate::eval::report::TimingRow;
use crate::forecast::{ForecastModel, ItemState};
use crate::sim::item_rng;
use crate::time::{Horizon, DAY};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub warmup: usize,
    pub rounds: usize,
    /// Target duration of one timed batch, seconds.
    pub sample_secs: f64,
    /// RPP is only fitted up to this size.
    pub rpp_max_size: usize,
    pub rpp_rounds: usize,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            sizes: vec![100, 1_000, 10_000, 100_000, 1_000_000],
            warmup: 3,
            rounds: 15,
            sample_secs: 1e-3,
            rpp_max_size: 100_000,
            rpp_rounds: 3,
            seed: 0,
        }
    }
}

/// A cascade of exactly `size` events with exponential gaps spread over two days.
pub fn synthetic_cascade(size: usize, static_width: usize, seed: u64) -> Cascade {
    let mut rng = item_rng(seed, size);
    let mean_gap = 2.0 * DAY / size.max(1) as f64;
    let mut t = 0.0;
    let events = (0..size)
        .map(|_| {
            let g: f64 = rng.sample(Exp1);
            t += g * mean_gap;
            Event::new(t, 1.0)
        })
        .collect();
    Cascade {
        item_id: format!("bench-{size}"),
        created_at: 0.0,
        events,
        static_attrs: vec![0.0; static_width],
        truncated: false,
        observed_until: None,
    }
}

/// Per-call seconds for `f`, timing batches of `inner` calls.
fn sample<F: FnMut()>(f: &mut F, inner: usize) -> f64 {
    let start = Instant::now();
    for _ in 0..inner {
        f();
    }
    start.elapsed().as_secs_f64() / inner as f64
}

fn calibrate<F: FnMut()>(f: &mut F, warmup: usize, target: f64) -> usize {
    let mut t = f64::INFINITY;
    for _ in 0..warmup.max(1) {
        t = t.min(sample(f, 1));
    }
    if t <= 0.0 {
        return 1_000;
    }
    ((target / t).ceil() as usize).clamp(1, 1_000_000)
}

struct Case<'a> {
    name: String,
    size: usize,
    rounds: usize,
    run: Box<dyn FnMut() + 'a>,
    inner: usize,
    samples: Vec<f64>,
}

/// Times prediction for each model in `models` on synthetic cascades of each
/// size. HWK needs a trained `hwk` model and predicts from a prebuilt item
/// state; SEISMIC predicts the final size from the history; RPP is a per-item
/// maximum-likelihood fit.
pub fn bench_prediction_cost(
    models: &[ModelKind],
    hwk: Option<&ForecastModel>,
    seismic: &SeismicConfig,
    rpp: &RppFitConfig,
    config: &BenchConfig,
) -> Result<Vec<TimingRow>> {
    if config.sizes.is_empty() || config.rounds == 0 {
        return Err(Error::Config("benchmark needs at least one size and one round".into()));
    }
    let static_width = hwk.map_or(0, |m| m.schema.static_width);
    let cascades: Vec<Cascade> = config.sizes.iter().map(|&n| synthetic_cascade(n, static_width, config.seed)).collect();
    let mut cases: Vec<Case> = Vec::new();
    for (c, &size) in cascades.iter().zip(&config.sizes) {
        let s = c.events.last().map_or(1.0, |e| e.t + 1.0);
        for &kind in models {
            let (name, rounds, run): (String, usize, Box<dyn FnMut()>) = match kind {
                ModelKind::Hwk => {
                    let model = hwk.ok_or_else(|| Error::Config("HWK timing needs a trained model".into()))?;
                    let state = ItemState::from_history(&model.schema.config, c, s)?;
                    let mut buf = Vec::with_capacity(model.schema.width());
                    let name = "HWK".to_string();
                    (
                        name,
                        config.rounds,
                        Box::new(move || {
                            state.features_into(black_box(s), &mut buf);
                            let _ = black_box(model.predict(&buf, state.count() as f64, Horizon::Infinite));
                        }),
                    )
                }
                ModelKind::Seismic => (
                    SEISMIC_NAME.into(),
                    config.rounds,
                    Box::new(move || {
                        let _ = black_box(seismic_predict(black_box(c), s, Horizon::Infinite, seismic));
                    }),
                ),
                ModelKind::Rpp => {
                    if size > config.rpp_max_size {
                        continue;
                    }
                    (
                        RPP_NAME.into(),
                        config.rpp_rounds.max(1),
                        Box::new(move || {
                            let _ = black_box(rpp_fit(black_box(c), s, rpp));
                        }),
                    )
                }
                other => return Err(Error::Config(format!("model {other:?} is not part of the cost benchmark"))),
            };
            cases.push(Case { name, size, rounds, run, inner: 1, samples: Vec::new() });
        }
    }
    for case in &mut cases {
        let warmup = if case.rounds < config.rounds { 1 } else { config.warmup };
        case.inner = calibrate(&mut case.run, warmup, config.sample_secs);
    }
    let max_rounds = cases.iter().map(|c| c.rounds).max().unwrap_or(0);
    for round in 0..max_rounds {
        for case in cases.iter_mut().filter(|c| round < c.rounds) {
            let t = sample(&mut case.run, case.inner);
            case.samples.push(t);
        }
    }
    Ok(cases
        .into_iter()
        .map(|mut c| TimingRow {
            model: c.name,
            size: c.size as u64,
            samples: c.samples.len(),
            mean_secs: c.samples.iter().sum::<f64>() / c.samples.len() as f64,
            median_secs: median(&mut c.samples),
        })
        .collect())
}

/// Least-squares slope of `ln(mean time)` against `ln(size)` for `model`.
pub fn loglog_slope(rows: &[TimingRow], model: &str) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.model == model && r.size > 0 && r.mean_secs > 0.0)
        .map(|r| ((r.size as f64).ln(), r.mean_secs.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Largest over smallest mean time for `model`.
pub fn max_min_ratio(rows: &[TimingRow], model: &str) -> Option<f64> {
    let means: Vec<f64> = rows.iter().filter(|r| r.model == model).map(|r| r.mean_secs).collect();
    let max = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = means.iter().copied().fold(f64::INFINITY, f64::min);
    (!means.is_empty() && min > 0.0).then(|| max / min)
}

/// Mean time of `model` at `size`.
pub fn mean_at(rows: &[TimingRow], model: &str, size: u64) -> Option<f64> {
    rows.iter().find(|r| r.model == model && r.size == size).map(|r| r.mean_secs)
}
