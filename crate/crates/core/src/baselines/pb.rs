//! Point-based baseline: one regressor per prediction horizon.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cascade::Cascade;
use crate::error::{Error, Result};
use crate::forecast::{build_training_set, fit_gbdt, FeatureConfig, FeatureSchema, ModelConfig, Regressor, TreeEnsemble};
use crate::time::Horizon;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PbModel {
    pub schema: FeatureSchema,
    pub log_offset: f64,
    pub models: Vec<(Horizon, TreeEnsemble)>,
}

/// Trains a separate count regressor for each horizon in `horizons`.
///
/// Uses the sampling policy, labels, offset and learner of `config`; the
/// reference horizons of `config` are ignored.
pub fn train_pb(cascades: &[Cascade], horizons: &[Horizon], features: &FeatureConfig, config: &ModelConfig) -> Result<PbModel> {
    if horizons.is_empty() {
        return Err(Error::param("at least one horizon is required"));
    }
    let fitted: Vec<Result<(FeatureSchema, Horizon, TreeEnsemble)>> = horizons
        .par_iter()
        .map(|&h| {
            let set = build_training_set(cascades, &[h], features, &config.sampling, &config.alpha_label, config.log_offset)?;
            if set.examples.is_empty() {
                return Err(Error::InsufficientData(format!("no training examples observed through horizon {h}")));
            }
            let y: Vec<f64> = set.examples.iter().map(|e| e.count_labels[0]).collect();
            let model = fit_gbdt(&set.rows(), &y, &config.gbdt)?;
            Ok((set.schema, h, model))
        })
        .collect();
    let mut schema = None;
    let mut models = Vec::with_capacity(horizons.len());
    for r in fitted {
        let (s, h, m) = r?;
        schema.get_or_insert(s);
        models.push((h, m));
    }
    Ok(PbModel { schema: schema.expect("nonempty horizons"), log_offset: config.log_offset, models })
}

impl PbModel {
    pub fn horizons(&self) -> Vec<Horizon> {
        self.models.iter().map(|(h, _)| *h).collect()
    }

    /// `N_s + max(0, exp(Y) - offset)` from the regressor trained at `delta`.
    pub fn predict(&self, features: &[f64], n_s: f64, delta: Horizon) -> Result<f64> {
        self.schema.check(features)?;
        let (_, m) = self
            .models
            .iter()
            .find(|(h, _)| *h == delta)
            .ok_or_else(|| Error::UnsupportedHorizon(format!("no point model trained for horizon {delta}")))?;
        Ok(n_s + (m.predict(features).exp() - self.log_offset).max(0.0))
    }
}
