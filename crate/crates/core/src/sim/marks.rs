use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distribution family of the mark scale `Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MarkLaw {
    /// `Z = rho1` almost surely.
    Constant,
    /// Exponential with mean `rho1`; `rho2 = 2 rho1²`.
    #[default]
    Exponential,
    /// Lognormal matching both moments; needs `rho2 > rho1²`.
    LogNormal,
}

impl MarkLaw {
    /// Second moment implied by the law for a given mean. `cv2` is the squared
    /// coefficient of variation, used only by the lognormal law.
    pub fn second_moment(self, mean: f64, cv2: f64) -> f64 {
        match self {
            MarkLaw::Constant => mean * mean,
            MarkLaw::Exponential => 2.0 * mean * mean,
            MarkLaw::LogNormal => mean * mean * (1.0 + cv2),
        }
    }
}

/// Sampler for `Z` with prescribed first two moments.
#[derive(Debug, Clone, Copy)]
pub struct MarkSampler {
    law: MarkLaw,
    mean: f64,
    ln_mu: f64,
    ln_sigma: f64,
}

impl MarkSampler {
    pub fn new(law: MarkLaw, mean: f64, second_moment: f64) -> Result<Self> {
        if !(mean >= 0.0 && mean.is_finite()) {
            return Err(Error::param(format!("mark mean must be finite and >= 0, got {mean}")));
        }
        let m2 = second_moment;
        let tol = 1e-9 * mean * mean + 1e-300;
        let (mut ln_mu, mut ln_sigma) = (0.0, 0.0);
        if mean > 0.0 {
            match law {
                MarkLaw::Constant if (m2 - mean * mean).abs() > tol => {
                    return Err(Error::param(format!("constant marks need rho2 = rho1² ({}), got {m2}", mean * mean)));
                }
                MarkLaw::Exponential if (m2 - 2.0 * mean * mean).abs() > tol => {
                    return Err(Error::param(format!(
                        "exponential marks need rho2 = 2 rho1² ({}), got {m2}",
                        2.0 * mean * mean
                    )));
                }
                MarkLaw::LogNormal => {
                    if !(m2 > mean * mean) {
                        return Err(Error::param("lognormal marks need rho2 > rho1²"));
                    }
                    let s2 = (m2 / (mean * mean)).ln();
                    ln_sigma = s2.sqrt();
                    ln_mu = mean.ln() - 0.5 * s2;
                }
                _ => {}
            }
        }
        Ok(MarkSampler { law, mean, ln_mu, ln_sigma })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.mean == 0.0 {
            return 0.0;
        }
        match self.law {
            MarkLaw::Constant => self.mean,
            MarkLaw::Exponential => {
                let e: f64 = Exp1.sample(rng);
                self.mean * e
            }
            MarkLaw::LogNormal => {
                let z: f64 = StandardNormal.sample(rng);
                (self.ln_mu + self.ln_sigma * z).exp()
            }
        }
    }
}
