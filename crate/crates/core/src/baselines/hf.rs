//! Horizon-as-feature baseline: one regressor with the horizon appended to
//! the features, trained on examples replicated across sampled horizons.

use serde::{Deserialize, Serialize};

use crate::cascade::Cascade;
use crate::error::{Error, Result};
use crate::forecast::{
    count_label, fit_gbdt, observed_increment, sample_snapshots, FeatureConfig, FeatureSchema, ModelConfig, Regressor,
    TreeEnsemble,
};
use crate::time::{Horizon, DAY, HOUR};

/// Horizons of the dense variant.
pub fn dense_horizons() -> Vec<Horizon> {
    [HOUR, 3.0 * HOUR, 6.0 * HOUR, 12.0 * HOUR, DAY, 2.0 * DAY, 4.0 * DAY, 7.0 * DAY]
        .into_iter()
        .map(Horizon::Finite)
        .collect()
}

/// Horizons of the sparse variant.
pub fn sparse_horizons() -> Vec<Horizon> {
    [HOUR, 6.0 * HOUR, DAY, 4.0 * DAY].into_iter().map(Horizon::Finite).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HfModel {
    pub schema: FeatureSchema,
    pub log_offset: f64,
    pub horizons: Vec<Horizon>,
    pub regressor: TreeEnsemble,
    /// Training rows per distinct snapshot used.
    pub inflation: f64,
}

/// Trains one regressor on `features ++ [delta]` over the finite `horizons`.
pub fn train_hf(cascades: &[Cascade], horizons: &[Horizon], features: &FeatureConfig, config: &ModelConfig) -> Result<HfModel> {
    if horizons.is_empty() || horizons.iter().any(|h| h.is_infinite()) {
        return Err(Error::param("horizon-as-feature training needs a nonempty set of finite horizons"));
    }
    let mut horizons = horizons.to_vec();
    horizons.sort_by(|a, b| a.seconds().total_cmp(&b.seconds()));
    horizons.dedup();
    let snaps = sample_snapshots(cascades, features, &config.sampling)?;
    let static_width = cascades.first().map_or(0, |c| c.static_attrs.len());
    let schema = FeatureSchema::new(static_width, features.clone())?;
    let mut rows = Vec::new();
    let mut y = Vec::new();
    let mut used = 0usize;
    for snap in &snaps {
        let before = rows.len();
        for &h in &horizons {
            if let Some(inc) = observed_increment(&cascades[snap.item], snap.s, h) {
                let mut row = snap.features.clone();
                row.push(h.seconds());
                rows.push(row);
                y.push(count_label(inc, config.log_offset));
            }
        }
        used += usize::from(rows.len() > before);
    }
    if rows.is_empty() {
        return Err(Error::InsufficientData("no observed training examples for any horizon".into()));
    }
    let regressor = fit_gbdt(&rows, &y, &config.gbdt)?;
    Ok(HfModel { schema, log_offset: config.log_offset, horizons, regressor, inflation: rows.len() as f64 / used as f64 })
}

impl HfModel {
    /// Prediction at any finite horizon within the trained range.
    pub fn predict(&self, features: &[f64], n_s: f64, delta: Horizon) -> Result<f64> {
        self.schema.check(features)?;
        let lo = self.horizons.first().expect("nonempty").seconds();
        let hi = self.horizons.last().expect("nonempty").seconds();
        let d = delta.seconds();
        if !(d >= lo && d <= hi) {
            return Err(Error::UnsupportedHorizon(format!(
                "horizon {delta} outside the trained range [{}, {}]",
                self.horizons[0],
                self.horizons[self.horizons.len() - 1]
            )));
        }
        let mut row = Vec::with_capacity(features.len() + 1);
        row.extend_from_slice(features);
        row.push(d);
        Ok(n_s + (self.regressor.predict(&row).exp() - self.log_offset).max(0.0))
    }
}
