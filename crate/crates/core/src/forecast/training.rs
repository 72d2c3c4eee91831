use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cascade::Cascade;
use crate::error::{Error, Result};
use crate::estimators::AlphaEstimator;
use crate::forecast::features::{FeatureConfig, FeatureSchema, ItemState};
use crate::sim::item_rng;
use crate::time::{Horizon, DAY, MINUTE};

/// How prediction times `s` are drawn per item: log-uniform over `[min_age, max_age]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingPolicy {
    pub per_item: usize,
    pub min_age: f64,
    pub max_age: f64,
    pub seed: u64,
}

impl Default for SamplingPolicy {
    fn default() -> Self {
        SamplingPolicy { per_item: 3, min_age: 30.0 * MINUTE, max_age: 3.0 * DAY, seed: 0 }
    }
}

impl SamplingPolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.min_age > 0.0 && self.max_age >= self.min_age && self.max_age.is_finite()) {
            return Err(Error::param(format!(
                "sampling ages must satisfy 0 < min_age <= max_age < inf, got [{}, {}]",
                self.min_age, self.max_age
            )));
        }
        Ok(())
    }

    /// The prediction times for item `index`, sorted.
    pub fn times(&self, index: usize) -> Vec<f64> {
        let mut rng = item_rng(self.seed, index);
        let (a, b) = (self.min_age.ln(), self.max_age.ln());
        let mut ts: Vec<f64> = (0..self.per_item).map(|_| (a + (b - a) * rng.random::<f64>()).exp()).collect();
        ts.sort_by(f64::total_cmp);
        ts
    }
}

/// An item observed at time `s`: features and current count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub item: usize,
    pub s: f64,
    pub n_s: f64,
    pub features: Vec<f64>,
}

/// Samples snapshots for every item under `policy`, in item order.
pub fn sample_snapshots(cascades: &[Cascade], config: &FeatureConfig, policy: &SamplingPolicy) -> Result<Vec<Snapshot>> {
    policy.validate()?;
    config.validate()?;
    let per_item: Vec<Result<Vec<Snapshot>>> = cascades
        .par_iter()
        .enumerate()
        .map(|(item, c)| {
            let mut state = ItemState::new(config, &c.static_attrs)?;
            let mut events = c.events.iter().peekable();
            let mut out = Vec::with_capacity(policy.per_item);
            for s in policy.times(item) {
                while let Some(e) = events.next_if(|e| e.t < s) {
                    state.observe(e.t, e.mark)?;
                }
                out.push(Snapshot { item, s, n_s: state.count() as f64, features: state.features(s) });
            }
            Ok(out)
        })
        .collect();
    let mut all = Vec::new();
    for r in per_item {
        all.extend(r?);
    }
    Ok(all)
}

/// `N(s + delta) - N(s)` if the cascade is observed through `s + delta`.
pub fn observed_increment(cascade: &Cascade, s: f64, delta: Horizon) -> Option<f64> {
    let end = cascade.observed_count(s + delta.seconds())?;
    Some((end - cascade.count_before(s)) as f64)
}

/// Count label `ln(increment + offset)`.
pub fn count_label(increment: f64, log_offset: f64) -> f64 {
    (increment + log_offset).ln()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingExample {
    pub snapshot: Snapshot,
    /// One label per reference horizon.
    pub count_labels: Vec<f64>,
    /// `ln` of the growth-exponent estimate on the full cascade.
    pub alpha_label: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingSet {
    pub schema: FeatureSchema,
    pub horizons: Vec<Horizon>,
    pub log_offset: f64,
    pub examples: Vec<TrainingExample>,
    /// Snapshots dropped because the cascade is not observed through `s + δ*_max`.
    pub dropped_truncated: usize,
    /// Snapshots dropped because the growth exponent could not be estimated.
    pub dropped_alpha: usize,
}

impl TrainingSet {
    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.examples.iter().map(|e| e.snapshot.features.clone()).collect()
    }
}

/// Builds labeled examples from `cascades`.
pub fn build_training_set(
    cascades: &[Cascade],
    horizons: &[Horizon],
    config: &FeatureConfig,
    policy: &SamplingPolicy,
    alpha: &AlphaEstimator,
    log_offset: f64,
) -> Result<TrainingSet> {
    if horizons.is_empty() {
        return Err(Error::param("at least one reference horizon is required"));
    }
    if !(log_offset >= 0.0 && log_offset.is_finite()) {
        return Err(Error::param(format!("log offset must be finite and >= 0, got {log_offset}")));
    }
    let static_width = cascades.first().map_or(0, |c| c.static_attrs.len());
    if let Some(c) = cascades.iter().find(|c| c.static_attrs.len() != static_width) {
        return Err(Error::param(format!(
            "item '{}' has {} static attributes, expected {static_width}",
            c.item_id,
            c.static_attrs.len()
        )));
    }
    let schema = FeatureSchema::new(static_width, config.clone())?;
    let alphas: Vec<Option<f64>> = cascades.par_iter().map(|c| alpha.estimate(c).ok()).collect();
    let mut examples = Vec::new();
    let (mut dropped_truncated, mut dropped_alpha) = (0, 0);
    for snap in sample_snapshots(cascades, config, policy)? {
        let c = &cascades[snap.item];
        let incs: Option<Vec<f64>> = horizons.iter().map(|&h| observed_increment(c, snap.s, h)).collect();
        let Some(incs) = incs else {
            dropped_truncated += 1;
            continue;
        };
        let Some(a) = alphas[snap.item].filter(|a| *a > 0.0 && a.is_finite()) else {
            dropped_alpha += 1;
            continue;
        };
        let count_labels: Vec<f64> = incs.iter().map(|&x| count_label(x, log_offset)).collect();
        if count_labels.iter().any(|y| !y.is_finite()) {
            return Err(Error::domain("zero increment with zero log offset gives an infinite label"));
        }
        examples.push(TrainingExample { snapshot: snap, count_labels, alpha_label: a.ln() });
    }
    Ok(TrainingSet { schema, horizons: horizons.to_vec(), log_offset, examples, dropped_truncated, dropped_alpha })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::time::HOUR;

    fn cascade() -> Cascade {
        let mut c = Cascade::from_times("a", &[10.0, 4000.0, 5000.0, 20_000.0]).unwrap();
        c.observed_until = Some(100.0 * DAY);
        c
    }

    #[test]
    fn one_item_two_horizons() {
        let policy = SamplingPolicy { per_item: 1, min_age: 3600.0, max_age: 3600.0, seed: 1 };
        let h = [Horizon::Finite(HOUR), Horizon::Finite(6.0 * HOUR)];
        let ts = build_training_set(&[cascade()], &h, &FeatureConfig::new(60.0), &policy, &AlphaEstimator::default(), 1.0)
            .unwrap();
        assert_eq!(ts.examples.len(), 1);
        let e = &ts.examples[0];
        assert_eq!(e.count_labels.len(), 2);
        assert_eq!(e.count_labels[0], 3.0f64.ln());
        assert_eq!(e.count_labels[1], 4.0f64.ln());
        assert!((e.alpha_label - (4.0 / 29_010.0f64).ln()).abs() < 1e-12);
    }

    #[test]
    fn zero_increment_uses_offset() {
        assert_eq!(count_label(0.0, 1.0), 0.0);
    }

    #[test]
    fn truncated_examples_dropped() {
        let mut c = cascade();
        c.observed_until = Some(2.0 * HOUR);
        let policy = SamplingPolicy { per_item: 2, min_age: 3600.0, max_age: 3600.0, seed: 1 };
        let ts = build_training_set(
            &[c],
            &[Horizon::Finite(6.0 * HOUR)],
            &FeatureConfig::new(60.0),
            &policy,
            &AlphaEstimator::default(),
            1.0,
        )
        .unwrap();
        assert!(ts.examples.is_empty());
        assert_eq!(ts.dropped_truncated, 2);
    }

    #[test]
    fn policy_times_in_range_and_deterministic() {
        let p = SamplingPolicy::default();
        let a = p.times(7);
        assert_eq!(a, p.times(7));
        assert!(a.iter().all(|&t| t >= p.min_age && t <= p.max_age));
        assert_ne!(a, p.times(8));
    }
}
