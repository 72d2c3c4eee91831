//! Static plus constant-time temporal features of an item at prediction time `s`.

use serde::{Deserialize, Serialize};

use crate::cascade::Cascade;
use crate::error::{Error, Result};
use crate::estimators::{SlidingWindowCounter, VelocityTracker, DEFAULT_BUCKETS};
use crate::time::{format_duration, DAY, HOUR};

pub const FEATURE_SCHEMA_VERSION: u32 = 1;

/// Trailing count windows, in seconds.
const COUNT_WINDOWS: [f64; 3] = [HOUR, 6.0 * HOUR, DAY];
/// Multiples of `d` used for the velocity features.
const VELOCITY_MULTIPLES: [f64; 3] = [1.0, 4.0, 16.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureConfig {
    /// Velocity window `d` in seconds.
    pub window: f64,
    #[serde(default = "default_buckets")]
    pub buckets: usize,
    #[serde(default = "default_gammas")]
    pub gammas: Vec<f64>,
}

fn default_buckets() -> usize {
    DEFAULT_BUCKETS
}

fn default_gammas() -> Vec<f64> {
    vec![0.5, 0.9]
}

impl FeatureConfig {
    pub fn new(window: f64) -> Self {
        FeatureConfig { window, buckets: DEFAULT_BUCKETS, gammas: default_gammas() }
    }

    /// Window set to 1% of the median cascade duration, where a cascade's
    /// duration is the time by which 95% of its events occurred.
    pub fn for_dataset(cascades: &[Cascade]) -> Result<Self> {
        let mut durations: Vec<f64> = cascades
            .iter()
            .filter(|c| !c.is_empty())
            .map(|c| {
                let k = ((0.95 * c.len() as f64).ceil() as usize).clamp(1, c.len());
                c.events[k - 1].t
            })
            .collect();
        if durations.is_empty() {
            return Err(Error::InsufficientData("no nonempty cascades to size the velocity window".into()));
        }
        durations.sort_by(f64::total_cmp);
        let median = durations[durations.len() / 2];
        let window = if median > 0.0 { 0.01 * median } else { 60.0 };
        Ok(FeatureConfig::new(window))
    }

    pub fn validate(&self) -> Result<()> {
        VelocityTracker::new(self.window, self.buckets, &self.gammas).map(|_| ())
    }

    pub fn temporal_width(&self) -> usize {
        7 + 3 + self.gammas.len()
    }
}

/// Describes the layout of a feature vector; stored with trained models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSchema {
    pub version: u32,
    pub static_width: usize,
    pub config: FeatureConfig,
    pub names: Vec<String>,
}

impl FeatureSchema {
    pub fn new(static_width: usize, config: FeatureConfig) -> Result<Self> {
        config.validate()?;
        let mut names: Vec<String> = (0..static_width).map(|i| format!("static_{i}")).collect();
        names.push("count".into());
        for m in VELOCITY_MULTIPLES {
            names.push(format!("velocity_{}", format_duration(m * config.window)));
        }
        for w in COUNT_WINDOWS {
            names.push(format!("count_last_{}", format_duration(w)));
        }
        names.push("age".into());
        names.push("log1p_count".into());
        names.push("mean_event_time".into());
        for g in &config.gammas {
            names.push(format!("crossing_time_{g}"));
        }
        Ok(FeatureSchema { version: FEATURE_SCHEMA_VERSION, static_width, config, names })
    }

    pub fn width(&self) -> usize {
        self.names.len()
    }

    /// Checks a feature vector against this schema.
    pub fn check(&self, features: &[f64]) -> Result<()> {
        if features.len() != self.width() {
            return Err(Error::param(format!(
                "feature vector has {} entries, model expects {}",
                features.len(),
                self.width()
            )));
        }
        if let Some(i) = features.iter().position(|x| !x.is_finite()) {
            return Err(Error::domain(format!("feature '{}' is not finite", self.names[i])));
        }
        Ok(())
    }
}

/// Streaming per-item state from which features are read in O(1) of the
/// event count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemState {
    static_attrs: Vec<f64>,
    tracker: VelocityTracker,
    velocity: [SlidingWindowCounter; 2],
    counts: [SlidingWindowCounter; 3],
}

impl ItemState {
    pub fn new(config: &FeatureConfig, static_attrs: &[f64]) -> Result<Self> {
        let d = config.window;
        let b = config.buckets;
        Ok(ItemState {
            static_attrs: static_attrs.to_vec(),
            tracker: VelocityTracker::new(d, b, &config.gammas)?,
            velocity: [
                SlidingWindowCounter::new(VELOCITY_MULTIPLES[1] * d, b)?,
                SlidingWindowCounter::new(VELOCITY_MULTIPLES[2] * d, b)?,
            ],
            counts: [
                SlidingWindowCounter::new(COUNT_WINDOWS[0], b)?,
                SlidingWindowCounter::new(COUNT_WINDOWS[1], b)?,
                SlidingWindowCounter::new(COUNT_WINDOWS[2], b)?,
            ],
        })
    }

    /// State after replaying the events of `cascade` strictly before `s`.
    pub fn from_history(config: &FeatureConfig, cascade: &Cascade, s: f64) -> Result<Self> {
        let mut state = ItemState::new(config, &cascade.static_attrs)?;
        for e in cascade.history(s) {
            state.observe(e.t, e.mark)?;
        }
        Ok(state)
    }

    pub fn observe(&mut self, t: f64, mark: f64) -> Result<()> {
        self.tracker.observe(t, mark)?;
        for w in self.velocity.iter_mut().chain(self.counts.iter_mut()) {
            w.observe(t);
        }
        Ok(())
    }

    pub fn count(&self) -> u64 {
        self.tracker.total_count()
    }

    pub fn tracker(&self) -> &VelocityTracker {
        &self.tracker
    }

    pub fn static_attrs(&self) -> &[f64] {
        &self.static_attrs
    }

    /// Writes the feature vector at time `s` into `out` (cleared first).
    pub fn features_into(&self, s: f64, out: &mut Vec<f64>) {
        out.clear();
        out.extend_from_slice(&self.static_attrs);
        let n = self.tracker.total_count() as f64;
        out.push(n);
        out.push(self.tracker.velocity(s));
        for w in &self.velocity {
            out.push(w.rate(s));
        }
        for w in &self.counts {
            out.push(w.count(s) as f64);
        }
        out.push(s);
        out.push(n.ln_1p());
        out.push(self.tracker.mean_time());
        for &g in self.tracker.gammas() {
            out.push(self.tracker.quantile_time(g));
        }
    }

    pub fn features(&self, s: f64) -> Vec<f64> {
        let mut out = Vec::new();
        self.features_into(s, &mut out);
        out
    }
}

/// Features of `cascade` at time `s`, using events strictly before `s`.
pub fn extract_features(cascade: &Cascade, s: f64, config: &FeatureConfig) -> Result<Vec<f64>> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::param(format!("prediction time must be finite and >= 0, got {s}")));
    }
    Ok(ItemState::from_history(config, cascade, s)?.features(s))
}
