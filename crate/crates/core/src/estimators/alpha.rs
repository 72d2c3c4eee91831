use serde::{Deserialize, Serialize};

use crate::cascade::Cascade;
use crate::error::{Error, Result};
use crate::hawkes::quantile_constant;

/// Which estimator of the effective growth exponent to use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AlphaMethod {
    Mean,
    Quantile { gamma: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlphaEstimator {
    pub method: AlphaMethod,
    /// Only events at or after this time are used, re-based to it.
    pub start_offset: f64,
    /// Use `1 / T_gamma` instead of `c_gamma / T_gamma`.
    pub raw_reciprocal: bool,
}

impl Default for AlphaEstimator {
    fn default() -> Self {
        AlphaEstimator { method: AlphaMethod::Mean, start_offset: 0.0, raw_reciprocal: false }
    }
}

impl AlphaEstimator {
    pub fn estimate(&self, cascade: &Cascade) -> Result<f64> {
        match self.method {
            AlphaMethod::Mean => alpha_mean(cascade, self.start_offset),
            AlphaMethod::Quantile { gamma } => {
                alpha_quantile(cascade, gamma, self.start_offset, self.raw_reciprocal)
            }
        }
    }
}

fn rebased(cascade: &Cascade, start_offset: f64) -> Result<Vec<f64>> {
    if !(start_offset >= 0.0) || !start_offset.is_finite() {
        return Err(Error::param(format!("start offset must be finite and >= 0, got {start_offset}")));
    }
    Ok(cascade
        .events
        .iter()
        .filter(|e| e.t >= start_offset)
        .map(|e| e.t - start_offset)
        .collect())
}

/// Mean-value estimator: reciprocal of the mean event time.
pub fn alpha_mean(cascade: &Cascade, start_offset: f64) -> Result<f64> {
    alpha_mean_times(&rebased(cascade, start_offset)?)
}

pub fn alpha_mean_times(times: &[f64]) -> Result<f64> {
    if times.is_empty() {
        return Err(Error::InsufficientData("mean-value estimator needs at least one event".into()));
    }
    let sum: f64 = times.iter().sum();
    if !(sum > 0.0) {
        return Err(Error::domain("all event times are zero: mean-value estimator undefined"));
    }
    Ok(times.len() as f64 / sum)
}

/// First event time at which the count reaches `gamma * n` (times sorted).
pub fn quantile_crossing_time(times: &[f64], gamma: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::param(format!("gamma must lie in (0, 1), got {gamma}")));
    }
    if times.is_empty() {
        return Err(Error::InsufficientData("quantile estimator needs at least one event".into()));
    }
    let k = ((gamma * times.len() as f64 - 1e-9).ceil() as usize).clamp(1, times.len());
    Ok(times[k - 1])
}

/// Quantile estimator `c_gamma / T_gamma`; `raw_reciprocal` gives `1 / T_gamma`.
pub fn alpha_quantile(
    cascade: &Cascade,
    gamma: f64,
    start_offset: f64,
    raw_reciprocal: bool,
) -> Result<f64> {
    let t = quantile_crossing_time(&rebased(cascade, start_offset)?, gamma)?;
    if !(t > 0.0) {
        return Err(Error::domain("quantile crossing time is zero: estimator undefined"));
    }
    let c = if raw_reciprocal { 1.0 } else { quantile_constant(gamma) };
    Ok(c / t)
}

/// Both sides of `∫ (n - N(t)) dt = Σ T_i`: the left by summing the
/// piecewise-constant integrand over inter-event gaps, the right directly.
pub fn remaining_integral_identity(cascade: &Cascade) -> (f64, f64) {
    let n = cascade.events.len();
    let mut lhs = 0.0;
    let mut prev = 0.0;
    for (i, e) in cascade.events.iter().enumerate() {
        lhs += (e.t - prev) * (n - i) as f64;
        prev = e.t;
    }
    let rhs = cascade.events.iter().map(|e| e.t).sum();
    (lhs, rhs)
}
