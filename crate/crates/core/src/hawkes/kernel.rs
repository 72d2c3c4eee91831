//! Excitation kernels and their primitives.

use crate::error::{Error, Result};
use crate::hawkes::params::PowerLawKernelParams;

/// `1 - exp(-x)` without cancellation for small `x`; `1` at `x = +inf`.
#[inline]
pub fn one_minus_exp_neg(x: f64) -> f64 {
    if x == f64::INFINITY {
        1.0
    } else {
        -(-x).exp_m1()
    }
}

/// A nonincreasing excitation kernel `phi` with primitive `Phi(x) = ∫_0^x phi`.
pub trait Kernel {
    fn value(&self, x: f64) -> f64;

    fn primitive(&self, x: f64) -> f64;

    /// `∫_0^∞ phi`, or `None` when the integral diverges.
    fn total_mass(&self) -> Option<f64>;
}

/// `phi(x) = exp(-beta x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpKernel {
    pub beta: f64,
}

impl Kernel for ExpKernel {
    fn value(&self, x: f64) -> f64 {
        (-self.beta * x).exp()
    }

    fn primitive(&self, x: f64) -> f64 {
        one_minus_exp_neg(self.beta * x) / self.beta
    }

    fn total_mass(&self) -> Option<f64> {
        Some(1.0 / self.beta)
    }
}

impl Kernel for PowerLawKernelParams {
    fn value(&self, x: f64) -> f64 {
        if x <= self.tau_cut {
            self.phi0
        } else {
            self.phi0 * (self.tau_cut / x).powf(1.0 + self.theta)
        }
    }

    fn primitive(&self, x: f64) -> f64 {
        let (phi0, tau, theta) = (self.phi0, self.tau_cut, self.theta);
        if x <= tau {
            return phi0 * x;
        }
        if x == f64::INFINITY {
            return self.total_mass().unwrap_or(f64::INFINITY);
        }
        let tail = if theta == 0.0 {
            tau * (x / tau).ln()
        } else {
            // tau/theta * (1 - (tau/x)^theta), via expm1 for theta near zero
            -tau / theta * (-theta * (x / tau).ln()).exp_m1()
        };
        phi0 * (tau + tail)
    }

    fn total_mass(&self) -> Option<f64> {
        (self.theta > 0.0).then(|| self.phi0 * self.tau_cut * (1.0 + 1.0 / self.theta))
    }
}

/// `scale * phi`, e.g. SEISMIC's `p * phi`.
#[derive(Debug, Clone, Copy)]
pub struct ScaledKernel<K> {
    pub inner: K,
    pub scale: f64,
}

impl<K: Kernel> Kernel for ScaledKernel<K> {
    fn value(&self, x: f64) -> f64 {
        self.scale * self.inner.value(x)
    }

    fn primitive(&self, x: f64) -> f64 {
        self.scale * self.inner.primitive(x)
    }

    fn total_mass(&self) -> Option<f64> {
        self.inner.total_mass().map(|m| m * self.scale)
    }
}

/// Excitation kernel of the exponential model when cascade marks hold the
/// jump scale `Z`: `beta * exp(-beta x)`.
pub fn exp_model_kernel(beta: f64) -> ScaledKernel<ExpKernel> {
    ScaledKernel { inner: ExpKernel { beta }, scale: beta }
}

/// Exponential kernel value `exp(-beta x)`.
pub fn kernel_exp(x: f64, beta: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::domain(format!("kernel argument must be >= 0, got {x}")));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::domain(format!("beta must be finite and > 0, got {beta}")));
    }
    Ok(ExpKernel { beta }.value(x))
}

/// Power-law kernel value (without the multiplier `p`).
pub fn kernel_power_law(x: f64, params: &PowerLawKernelParams) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::domain(format!("kernel argument must be >= 0, got {x}")));
    }
    params.validate()?;
    Ok(params.value(x))
}
