//! SEISMIC-style final-size estimator with constant node degree.
//!
//! The infectiousness estimate is `p = N(s) / Σ d Φ(s - T_i)`. The final size
//! is `N(s) + R / (1 - p d ∫φ)` with residual `R = Σ p d (∫φ - Φ(s - T_i))`.

use serde::{Deserialize, Serialize};

use crate::cascade::Cascade;
use crate::error::{Error, Result};
use crate::hawkes::{Kernel, PowerLawKernelParams};
use crate::time::Horizon;

/// Reference memory-kernel cutoff in seconds.
pub const DEFAULT_TAU_CUT: f64 = 300.0;
/// Reference memory-kernel tail exponent.
pub const DEFAULT_THETA: f64 = 0.2314843;
/// Reference mean node degree.
pub const DEFAULT_DEGREE: f64 = 100.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeismicConfig {
    pub kernel: PowerLawKernelParams,
    pub degree: f64,
    /// Triangular smoothing window in seconds; `None` disables smoothing.
    #[serde(default)]
    pub smoothing_window: Option<f64>,
    /// Largest branching factor `p d ∫φ` used in prediction.
    pub max_branching: f64,
}

impl Default for SeismicConfig {
    fn default() -> Self {
        SeismicConfig {
            kernel: PowerLawKernelParams::normalized(DEFAULT_TAU_CUT, DEFAULT_THETA, 1.0)
                .expect("default kernel is valid"),
            degree: DEFAULT_DEGREE,
            smoothing_window: None,
            max_branching: 0.95,
        }
    }
}

impl SeismicConfig {
    pub fn validate(&self) -> Result<()> {
        self.kernel.validate()?;
        if self.kernel.total_mass().is_none() {
            return Err(Error::param("kernel must have a finite integral (theta > 0)"));
        }
        if !(self.degree > 0.0 && self.degree.is_finite()) {
            return Err(Error::param(format!("degree must be finite and > 0, got {}", self.degree)));
        }
        if let Some(h) = self.smoothing_window {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::param(format!("smoothing window must be finite and > 0, got {h}")));
            }
        }
        if !(self.max_branching > 0.0 && self.max_branching < 1.0) {
            return Err(Error::param(format!("max_branching must lie in (0, 1), got {}", self.max_branching)));
        }
        Ok(())
    }
}

/// `Ψ(x) = ∫_0^x v φ(v) dv` for the power-law kernel.
fn first_moment(k: &PowerLawKernelParams, x: f64) -> f64 {
    let (phi0, tau, theta) = (k.phi0, k.tau_cut, k.theta);
    if x <= tau {
        return 0.5 * phi0 * x * x;
    }
    let head = 0.5 * phi0 * tau * tau;
    let c = phi0 * tau.powf(1.0 + theta);
    let tail = if (theta - 1.0).abs() < 1e-12 {
        c * (x / tau).ln()
    } else {
        c * (x.powf(1.0 - theta) - tau.powf(1.0 - theta)) / (1.0 - theta)
    };
    head + tail
}

/// `∫_0^a (1 - (a - v)/h)_+ φ(v) dv`: triangular-weighted kernel mass seen by time `a`.
fn smoothed_primitive(k: &PowerLawKernelParams, a: f64, h: f64) -> f64 {
    let lo = (a - h).max(0.0);
    (1.0 - a / h) * (k.primitive(a) - k.primitive(lo)) + (first_moment(k, a) - first_moment(k, lo)) / h
}

/// Infectiousness estimate from the events before `s`.
pub fn seismic_estimate_p(cascade: &Cascade, s: f64, config: &SeismicConfig) -> Result<f64> {
    config.validate()?;
    let hist = cascade.history(s);
    let k = &config.kernel;
    let (num, den) = match config.smoothing_window {
        None => (hist.len() as f64, hist.iter().map(|e| config.degree * k.primitive(s - e.t)).sum::<f64>()),
        Some(h) => hist.iter().fold((0.0, 0.0), |(n, d), e| {
            let a = s - e.t;
            (n + (1.0 - a / h).max(0.0), d + config.degree * smoothed_primitive(k, a, h))
        }),
    };
    if !(den > 0.0) {
        return Err(Error::domain("infectiousness denominator is zero: no exposure before s"));
    }
    Ok(num / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeismicPrediction {
    pub p_hat: f64,
    pub final_size: f64,
    /// Set when the estimated branching factor was capped.
    pub capped: bool,
}

/// Final-size prediction; only the infinite horizon is supported.
pub fn seismic_predict(cascade: &Cascade, s: f64, delta: Horizon, config: &SeismicConfig) -> Result<SeismicPrediction> {
    if !delta.is_infinite() {
        return Err(Error::UnsupportedHorizon(format!(
            "SEISMIC predicts the final size only, got horizon {delta}"
        )));
    }
    let p_hat = seismic_estimate_p(cascade, s, config)?;
    Ok(seismic_final_size(cascade, s, p_hat, config))
}

/// `N(s) + R / (1 - p d ∫φ)` for a given infectiousness.
pub fn seismic_final_size(cascade: &Cascade, s: f64, p_hat: f64, config: &SeismicConfig) -> SeismicPrediction {
    let k = &config.kernel;
    let mass = k.total_mass().expect("validated kernel");
    let hist = cascade.history(s);
    let n_s = hist.len() as f64;
    let scale = p_hat * config.degree;
    let residual: f64 = hist.iter().map(|e| scale * (mass - k.primitive(s - e.t))).sum();
    let branching = scale * mass;
    let capped = branching > config.max_branching;
    let branching = branching.min(config.max_branching);
    SeismicPrediction { p_hat, final_size: n_s + residual / (1.0 - branching), capped }
}
