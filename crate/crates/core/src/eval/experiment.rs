//! Train a model roster on a dataset and evaluate it over a horizon grid.

use std::collections::BTreeMap;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{
    dense_horizons, rpp_fit, rpp_predict, seismic_predict, sparse_horizons, train_hf, train_pb, HfModel, PbModel,
    RppFitConfig, SeismicConfig,
};
use crate::cascade::Cascade;
use crate::error::{Error, Result};
use crate::eval::metrics::{kendall_tau, mape, median, rmse};
use crate::eval::report::{fingerprint, CellMetrics, EvalReport, TimingRow, TrainingSummary, REPORT_FORMAT_VERSION};
use crate::forecast::{sample_snapshots, FeatureConfig, ForecastModel, ModelConfig, SamplingPolicy, Snapshot};
use crate::time::{Horizon, DAY, HOUR};

/// Default evaluation horizons.
pub fn default_horizon_grid() -> Vec<Horizon> {
    let mut g = dense_horizons();
    g.push(Horizon::Infinite);
    g
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Hwk,
    Pb,
    Hf,
    Rpp,
    Seismic,
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hwk" => Ok(ModelKind::Hwk),
            "pb" => Ok(ModelKind::Pb),
            "hf" => Ok(ModelKind::Hf),
            "rpp" => Ok(ModelKind::Rpp),
            "seismic" => Ok(ModelKind::Seismic),
            other => Err(Error::Config(format!("unknown model '{other}' (expected hwk, pb, hf, rpp or seismic)"))),
        }
    }
}

/// Display name of a HWK variant, e.g. `HWK(6h,1d,4d)`.
pub fn hwk_name(horizons: &[Horizon]) -> String {
    let parts: Vec<String> = horizons.iter().map(|h| h.to_string()).collect();
    format!("HWK({})", parts.join(","))
}

pub const PB_NAME: &str = "PB";
pub const HF_DENSE_NAME: &str = "HF-dense";
pub const HF_SPARSE_NAME: &str = "HF-sparse";
pub const RPP_NAME: &str = "RPP";
pub const SEISMIC_NAME: &str = "SEISMIC";

pub const SPLITS: [&str; 5] = ["overall", "low", "high", "early", "late"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub models: Vec<ModelKind>,
    pub horizons: Vec<Horizon>,
    pub hwk_variants: Vec<Vec<Horizon>>,
    pub hf_dense: Vec<Horizon>,
    pub hf_sparse: Vec<Horizon>,
    /// Learner, sampling and label settings shared by all learned models.
    pub model: ModelConfig,
    /// Velocity window etc.; sized from the training data when absent.
    pub features: Option<FeatureConfig>,
    pub eval_sampling: SamplingPolicy,
    /// Items whose index is a multiple of this go to the test set.
    pub test_every: usize,
    /// Final size separating the low and high popularity splits.
    pub popularity_threshold: f64,
    /// Prediction age separating the early and late splits.
    pub early_late_age: f64,
    /// RPP is fitted on snapshots of the first this-many test items.
    pub rpp_items: usize,
    pub rpp: RppFitConfig,
    pub seismic: SeismicConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 0,
            models: vec![ModelKind::Hwk, ModelKind::Pb, ModelKind::Hf, ModelKind::Rpp, ModelKind::Seismic],
            horizons: default_horizon_grid(),
            hwk_variants: vec![
                vec![Horizon::Finite(DAY)],
                vec![Horizon::Finite(6.0 * HOUR), Horizon::Finite(4.0 * DAY)],
                vec![Horizon::Finite(6.0 * HOUR), Horizon::Finite(DAY), Horizon::Finite(4.0 * DAY)],
            ],
            hf_dense: dense_horizons(),
            hf_sparse: sparse_horizons(),
            model: ModelConfig::default(),
            features: None,
            eval_sampling: SamplingPolicy::default(),
            test_every: 5,
            popularity_threshold: 1000.0,
            early_late_age: DAY,
            rpp_items: 200,
            rpp: RppFitConfig::default(),
            seismic: SeismicConfig::default(),
        }
    }
}

impl ExperimentConfig {
    /// Copy with every component seed derived from `seed`.
    pub fn resolved(&self) -> Self {
        let mut c = self.clone();
        c.model.sampling.seed = self.seed;
        c.model.gbdt.seed = self.seed;
        c.eval_sampling.seed = self.seed ^ 0x9e37_79b9_7f4a_7c15;
        c
    }

    pub fn validate(&self) -> Result<()> {
        if self.test_every < 2 {
            return Err(Error::Config("test_every must be >= 2".into()));
        }
        if self.horizons.is_empty() {
            return Err(Error::Config("the horizon grid is empty".into()));
        }
        self.model.sampling.validate()?;
        self.model.gbdt.validate()?;
        self.eval_sampling.validate()?;
        self.seismic.validate()
    }

    fn has(&self, k: ModelKind) -> bool {
        self.models.contains(&k)
    }
}

/// A trained or configured member of the roster.
#[derive(Debug, Clone)]
pub enum TrainedModel {
    Hwk(String, ForecastModel),
    Pb(PbModel),
    Hf(String, HfModel),
    Rpp(RppFitConfig),
    Seismic(SeismicConfig),
}

impl TrainedModel {
    pub fn name(&self) -> &str {
        match self {
            TrainedModel::Hwk(n, _) | TrainedModel::Hf(n, _) => n,
            TrainedModel::Pb(_) => PB_NAME,
            TrainedModel::Rpp(_) => RPP_NAME,
            TrainedModel::Seismic(_) => SEISMIC_NAME,
        }
    }

    fn fingerprint(&self) -> Result<String> {
        match self {
            TrainedModel::Hwk(_, m) => fingerprint(m),
            TrainedModel::Pb(m) => fingerprint(m),
            TrainedModel::Hf(_, m) => fingerprint(m),
            TrainedModel::Rpp(c) => fingerprint(c),
            TrainedModel::Seismic(c) => fingerprint(c),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Outcome {
    Value(f64),
    Unsupported,
    Failed,
    Skipped,
}

fn classify(r: Result<f64>) -> Outcome {
    match r {
        Ok(v) if v.is_finite() => Outcome::Value(v),
        Err(Error::UnsupportedHorizon(_)) => Outcome::Unsupported,
        _ => Outcome::Failed,
    }
}

fn predict_snapshot(
    model: &TrainedModel,
    cascade: &Cascade,
    snap: &Snapshot,
    horizons: &[Horizon],
    rpp_eligible: bool,
) -> Vec<Outcome> {
    let n_s = snap.n_s;
    let x = &snap.features;
    match model {
        TrainedModel::Hwk(_, m) => horizons.iter().map(|&h| classify(m.predict(x, n_s, h))).collect(),
        TrainedModel::Pb(m) => horizons.iter().map(|&h| classify(m.predict(x, n_s, h))).collect(),
        TrainedModel::Hf(_, m) => horizons.iter().map(|&h| classify(m.predict(x, n_s, h))).collect(),
        TrainedModel::Seismic(c) => horizons
            .iter()
            .map(|&h| classify(seismic_predict(cascade, snap.s, h, c).map(|p| p.final_size)))
            .collect(),
        TrainedModel::Rpp(c) => {
            if !rpp_eligible {
                return vec![Outcome::Skipped; horizons.len()];
            }
            match rpp_fit(cascade, snap.s, c) {
                Ok(fit) => horizons.iter().map(|&h| classify(Ok(rpp_predict(&fit.params, n_s, snap.s, h)))).collect(),
                Err(_) => vec![Outcome::Failed; horizons.len()],
            }
        }
    }
}

/// Result of [`run_experiment`].
#[derive(Debug, Clone)]
pub struct Experiment {
    pub report: EvalReport,
    pub models: Vec<TrainedModel>,
    pub feature_config: FeatureConfig,
}

/// Splits `cascades` into training and test items by index.
pub fn split_indices(n: usize, test_every: usize) -> (Vec<usize>, Vec<usize>) {
    (0..n).partition(|i| i % test_every != 0)
}

pub fn dataset_fingerprint(cascades: &[Cascade]) -> Result<String> {
    fingerprint(cascades)
}

/// Trains the configured roster on the training split and evaluates it on
/// the test split.
pub fn run_experiment(cascades: &[Cascade], config: &ExperimentConfig) -> Result<Experiment> {
    let config = config.resolved();
    config.validate()?;
    let (train_idx, test_idx) = split_indices(cascades.len(), config.test_every);
    let train: Vec<Cascade> = train_idx.iter().map(|&i| cascades[i].clone()).collect();
    let test: Vec<Cascade> = test_idx.iter().map(|&i| cascades[i].clone()).collect();
    if train.is_empty() || test.is_empty() {
        return Err(Error::InsufficientData("need at least one training and one test item".into()));
    }
    let features = match &config.features {
        Some(f) => f.clone(),
        None => FeatureConfig::for_dataset(&train)?,
    };

    let mut models = Vec::new();
    let mut training = Vec::new();
    if config.has(ModelKind::Hwk) {
        for hs in &config.hwk_variants {
            let mc = ModelConfig { horizons: hs.clone(), ..config.model.clone() };
            let (m, set) = ForecastModel::train(&train, &features, &mc)?;
            let name = hwk_name(hs);
            training.push(TrainingSummary {
                model: name.clone(),
                examples: set.examples.len(),
                dropped_truncated: set.dropped_truncated,
                dropped_alpha: set.dropped_alpha,
            });
            models.push(TrainedModel::Hwk(name, m));
        }
    }
    if config.has(ModelKind::Pb) {
        models.push(TrainedModel::Pb(train_pb(&train, &config.horizons, &features, &config.model)?));
    }
    if config.has(ModelKind::Hf) {
        models.push(TrainedModel::Hf(HF_DENSE_NAME.into(), train_hf(&train, &config.hf_dense, &features, &config.model)?));
        models.push(TrainedModel::Hf(HF_SPARSE_NAME.into(), train_hf(&train, &config.hf_sparse, &features, &config.model)?));
    }
    if config.has(ModelKind::Rpp) {
        models.push(TrainedModel::Rpp(config.rpp));
    }
    if config.has(ModelKind::Seismic) {
        models.push(TrainedModel::Seismic(config.seismic.clone()));
    }

    let snaps = sample_snapshots(&test, &features, &config.eval_sampling)?;
    let horizons = &config.horizons;
    let truths: Vec<Vec<Option<f64>>> = snaps
        .iter()
        .map(|sn| horizons.iter().map(|&h| test[sn.item].observed_count(sn.s + h.seconds()).map(|c| c as f64)).collect())
        .collect();
    let in_split = |split: &str, sn: &Snapshot| -> bool {
        let final_size = test[sn.item].len() as f64;
        match split {
            "low" => final_size < config.popularity_threshold,
            "high" => final_size >= config.popularity_threshold,
            "early" => sn.s < config.early_late_age,
            "late" => sn.s >= config.early_late_age,
            _ => true,
        }
    };

    let mut cells = Vec::new();
    let mut timings = Vec::new();
    let mut counters = BTreeMap::new();
    counters.insert("train_items".into(), train.len());
    counters.insert("test_items".into(), test.len());
    counters.insert("test_snapshots".into(), snaps.len());
    let uncovered = truths.iter().flatten().filter(|t| t.is_none()).count();
    counters.insert("test_labels_uncovered".into(), uncovered);
    let mut model_fingerprints = BTreeMap::new();

    for model in &models {
        model_fingerprints.insert(model.name().to_string(), model.fingerprint()?);
        let timed: Vec<(Vec<Outcome>, f64)> = snaps
            .par_iter()
            .map(|sn| {
                let start = Instant::now();
                let out = predict_snapshot(model, &test[sn.item], sn, horizons, sn.item < config.rpp_items);
                (out, start.elapsed().as_secs_f64())
            })
            .collect();
        timings.extend(timing_by_decade(model.name(), &snaps, &timed));
        for (hi, &h) in horizons.iter().enumerate() {
            let supported = !timed.iter().any(|(o, _)| o[hi] == Outcome::Unsupported);
            for split in SPLITS {
                let (mut p, mut t, mut missing) = (Vec::new(), Vec::new(), 0);
                for (si, sn) in snaps.iter().enumerate() {
                    let Some(truth) = truths[si][hi] else { continue };
                    if !in_split(split, sn) {
                        continue;
                    }
                    match timed[si].0[hi] {
                        Outcome::Value(v) => {
                            p.push(v);
                            t.push(truth);
                        }
                        Outcome::Failed => missing += 1,
                        Outcome::Unsupported | Outcome::Skipped => {}
                    }
                }
                cells.push(cell(model.name(), h, split, supported, &p, &t, missing));
            }
        }
    }

    let config_json = serde_json::to_value(&config)?;
    let report = EvalReport {
        format_version: REPORT_FORMAT_VERSION,
        seed: config.seed,
        dataset_fingerprint: dataset_fingerprint(cascades)?,
        config_fingerprint: fingerprint(&config_json)?,
        config: config_json,
        model_fingerprints,
        training,
        counters,
        cells,
        timings,
    };
    Ok(Experiment { report, models, feature_config: features })
}

fn cell(model: &str, horizon: Horizon, split: &str, supported: bool, p: &[f64], t: &[f64], n_missing: usize) -> CellMetrics {
    let m = mape(p, t).ok();
    CellMetrics {
        model: model.to_string(),
        horizon,
        split: split.to_string(),
        supported,
        n: p.len(),
        n_missing,
        n_zero_truth: m.map_or(t.iter().filter(|v| **v == 0.0).count(), |m| m.n_zero_truth),
        mape: m.map(|m| m.value),
        kendall_tau: kendall_tau(p, t).ok(),
        rmse: rmse(p, t).ok(),
    }
}

/// Per-snapshot prediction times grouped by the decade of `N(s)`.
fn timing_by_decade(model: &str, snaps: &[Snapshot], timed: &[(Vec<Outcome>, f64)]) -> Vec<TimingRow> {
    let mut buckets: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
    for (sn, (out, secs)) in snaps.iter().zip(timed) {
        if out.iter().all(|o| matches!(o, Outcome::Skipped | Outcome::Unsupported)) {
            continue;
        }
        let decade = if sn.n_s < 1.0 { 0 } else { 10u64.pow(sn.n_s.log10().floor() as u32) };
        buckets.entry(decade).or_default().push(*secs);
    }
    buckets
        .into_iter()
        .map(|(size, mut v)| TimingRow {
            model: model.to_string(),
            size,
            samples: v.len(),
            mean_secs: v.iter().sum::<f64>() / v.len() as f64,
            median_secs: median(&mut v),
        })
        .collect()
}
