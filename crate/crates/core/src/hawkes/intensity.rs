//! Stochastic intensity of the exponential-kernel model.

use crate::cascade::{Cascade, Event};
use crate::error::{Error, Result};
use crate::hawkes::params::HawkesExpParams;

/// `lambda(t)` by direct summation over the events strictly before `t`.
///
/// Cascade marks are jump scales `Z`; the jump in intensity is `beta * Z`.
pub fn intensity_at(cascade: &Cascade, params: &HawkesExpParams, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::domain(format!("time must be >= 0, got {t}")));
    }
    let beta = params.beta();
    let excitation: f64 = cascade
        .history(t)
        .iter()
        .map(|e| beta * e.mark * (-beta * (t - e.t)).exp())
        .sum();
    Ok(params.lambda0() * (-beta * t).exp() + excitation)
}

/// O(1)-per-event intensity recursion
/// `lambda(T_k+) = lambda(T_{k-1}+) exp(-beta (T_k - T_{k-1})) + beta Z_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntensityRecursion {
    beta: f64,
    last_t: f64,
    /// Intensity right after the last event (or at time zero).
    level: f64,
}

impl IntensityRecursion {
    pub fn new(params: &HawkesExpParams) -> Self {
        IntensityRecursion { beta: params.beta(), last_t: 0.0, level: params.lambda0() }
    }

    /// Starts from a known intensity at time `t`.
    pub fn from_state(beta: f64, t: f64, intensity: f64) -> Self {
        IntensityRecursion { beta, last_t: t, level: intensity }
    }

    pub fn observe(&mut self, event: Event) -> Result<()> {
        if event.t < self.last_t {
            return Err(Error::OutOfOrder { t: event.t, last: self.last_t });
        }
        self.level = self.level * (-self.beta * (event.t - self.last_t)).exp() + self.beta * event.mark;
        self.last_t = event.t;
        Ok(())
    }

    /// Intensity at `t >= ` the last observed event, excluding events at `t`.
    pub fn at(&self, t: f64) -> f64 {
        self.level * (-self.beta * (t - self.last_t)).exp()
    }

    pub fn last_time(&self) -> f64 {
        self.last_t
    }
}

/// `lambda(t)` through the recursion. Agrees with [`intensity_at`] up to
/// rounding but costs O(log n) after an O(n) scan, and O(1) per event when
/// used incrementally.
pub fn intensity_recursive(cascade: &Cascade, params: &HawkesExpParams, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::domain(format!("time must be >= 0, got {t}")));
    }
    let mut rec = IntensityRecursion::new(params);
    for &e in cascade.history(t) {
        rec.observe(e)?;
    }
    Ok(rec.at(t))
}
