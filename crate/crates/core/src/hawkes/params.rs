use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest admissible effective growth exponent. Parameters closer to the
/// critical point are rejected instead of series-expanded.
pub const MIN_ALPHA: f64 = 1e-9;

/// Parameters of the exponential-kernel Hawkes process with baseline
/// `lambda0 * exp(-beta t)` and intensity jumps `beta * Z`, `Z` having
/// moments `rho1 = E[Z]`, `rho2 = E[Z^2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawExpParams", into = "RawExpParams")]
pub struct HawkesExpParams {
    beta: f64,
    rho1: f64,
    rho2: f64,
    lambda0: f64,
}

#[derive(Serialize, Deserialize)]
struct RawExpParams {
    beta: f64,
    rho1: f64,
    rho2: f64,
    lambda0: f64,
}

impl TryFrom<RawExpParams> for HawkesExpParams {
    type Error = Error;
    fn try_from(r: RawExpParams) -> Result<Self> {
        HawkesExpParams::new(r.beta, r.rho1, r.rho2, r.lambda0)
    }
}

impl From<HawkesExpParams> for RawExpParams {
    fn from(p: HawkesExpParams) -> Self {
        RawExpParams { beta: p.beta, rho1: p.rho1, rho2: p.rho2, lambda0: p.lambda0 }
    }
}

impl HawkesExpParams {
    pub fn new(beta: f64, rho1: f64, rho2: f64, lambda0: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::param(format!("beta must be finite and > 0, got {beta}")));
        }
        if !(rho1.is_finite() && (0.0..1.0).contains(&rho1)) {
            return Err(Error::param(format!("rho1 must lie in [0, 1), got {rho1}")));
        }
        // Allow for rounding when rho2 was computed as rho1^2.
        if !rho2.is_finite() || rho2 < rho1 * rho1 * (1.0 - 1e-12) {
            return Err(Error::param(format!("rho2 = {rho2} must be >= rho1^2 = {}", rho1 * rho1)));
        }
        if !(lambda0.is_finite() && lambda0 >= 0.0) {
            return Err(Error::param(format!("lambda0 must be finite and >= 0, got {lambda0}")));
        }
        let alpha = beta * (1.0 - rho1);
        if alpha < MIN_ALPHA {
            return Err(Error::param(format!("alpha = {alpha} is below the minimum {MIN_ALPHA}")));
        }
        Ok(HawkesExpParams { beta, rho1, rho2: rho2.max(rho1 * rho1), lambda0 })
    }

    /// Same process with a different initial intensity.
    pub fn with_lambda0(self, lambda0: f64) -> Result<Self> {
        HawkesExpParams::new(self.beta, self.rho1, self.rho2, lambda0)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn rho1(&self) -> f64 {
        self.rho1
    }

    pub fn rho2(&self) -> f64 {
        self.rho2
    }

    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }

    /// Branching ratio; equals `rho1` for this model.
    pub fn mu(&self) -> f64 {
        self.rho1
    }

    /// Effective growth exponent `beta (1 - rho1)`.
    pub fn alpha(&self) -> f64 {
        self.beta * (1.0 - self.rho1)
    }

    /// Variance of the mark scale `Z`.
    pub fn sigma2(&self) -> f64 {
        (self.rho2 - self.rho1 * self.rho1).max(0.0)
    }

    /// `Σ² = (1 - beta rho1)² + beta² sigma2`, the limit factor of the
    /// published conditional-variance formula.
    ///
    /// The expression is not invariant to the time unit and disagrees with
    /// simulation whenever `rho1 > 0`; see [`Self::cluster_sigma_sq`].
    pub fn sigma_sq(&self) -> f64 {
        let a = 1.0 - self.beta * self.rho1;
        a * a + self.beta * self.beta * self.sigma2()
    }

    /// `(1 + sigma2) / (1 - rho1)²`, the limit factor of the exact variance
    /// of the remaining cascade size (mixed-Poisson branching argument).
    pub fn cluster_sigma_sq(&self) -> f64 {
        let d = 1.0 - self.rho1;
        (1.0 + self.sigma2()) / (d * d)
    }
}

/// Power-law kernel `phi0` on `[0, tau_cut]`, `phi0 (tau_cut/x)^(1+theta)`
/// beyond, with SEISMIC's infectiousness multiplier `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawKernelParams {
    pub phi0: f64,
    pub tau_cut: f64,
    /// Tail exponent. Values in `(-1, 0]` give a decaying kernel with an
    /// infinite integral; those are accepted here and rejected by every
    /// operation that needs the total mass.
    pub theta: f64,
    pub p: f64,
}

impl PowerLawKernelParams {
    pub fn new(phi0: f64, tau_cut: f64, theta: f64, p: f64) -> Result<Self> {
        let k = PowerLawKernelParams { phi0, tau_cut, theta, p };
        k.validate()?;
        Ok(k)
    }

    /// Kernel normalized so that its integral is one.
    pub fn normalized(tau_cut: f64, theta: f64, p: f64) -> Result<Self> {
        if !(theta > 0.0) {
            return Err(Error::param("a normalized power-law kernel needs theta > 0"));
        }
        PowerLawKernelParams::new(1.0 / (tau_cut * (1.0 + 1.0 / theta)), tau_cut, theta, p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.phi0.is_finite() && self.phi0 > 0.0) {
            return Err(Error::param(format!("phi0 must be > 0, got {}", self.phi0)));
        }
        if !(self.tau_cut.is_finite() && self.tau_cut > 0.0) {
            return Err(Error::param(format!("tau_cut must be > 0, got {}", self.tau_cut)));
        }
        if !(self.theta.is_finite() && self.theta > -1.0) {
            return Err(Error::param(format!("theta must be finite and > -1, got {}", self.theta)));
        }
        if !(self.p.is_finite() && self.p >= 0.0) {
            return Err(Error::param(format!("p must be >= 0, got {}", self.p)));
        }
        Ok(())
    }
}
