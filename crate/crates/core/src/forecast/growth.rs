//! Threshold rule for whether an item will grow by a factor `c`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthRule {
    /// Fires when `lambda(s) >= (c - 1) alpha N(s)`.
    Expected,
    /// Adds the confidence margin `chi(N(s))` to `c - 1`.
    Confident,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthDecision {
    Exceeds,
    NotExceeds,
}

/// `chi(x) = k + sqrt(2 (c - 1) k + k^2)` with `k = Sigma^2 / (2 eps x)`.
pub fn growth_margin(sigma_sq: f64, c: f64, eps_conf: f64, n_s: f64) -> f64 {
    let k = sigma_sq / (2.0 * eps_conf * n_s);
    k + (2.0 * (c - 1.0) * k + k * k).sqrt()
}

pub fn relative_growth_decision(
    lambda_s: f64,
    n_s: f64,
    alpha: f64,
    sigma_sq: f64,
    c: f64,
    eps_conf: f64,
    rule: GrowthRule,
) -> Result<GrowthDecision> {
    if !(c > 1.0) {
        return Err(Error::param(format!("growth factor must be > 1, got {c}")));
    }
    if !(eps_conf > 0.0 && eps_conf <= 1.0) {
        return Err(Error::param(format!("confidence level must lie in (0, 1], got {eps_conf}")));
    }
    if !(n_s >= 1.0) {
        return Err(Error::param(format!("current count must be >= 1, got {n_s}")));
    }
    if !(sigma_sq >= 0.0) || !(alpha > 0.0) || !(lambda_s >= 0.0) {
        return Err(Error::domain("need lambda >= 0, alpha > 0 and Sigma^2 >= 0"));
    }
    let margin = match rule {
        GrowthRule::Expected => 0.0,
        GrowthRule::Confident => growth_margin(sigma_sq, c, eps_conf, n_s),
    };
    Ok(if lambda_s >= (c - 1.0 + margin) * alpha * n_s {
        GrowthDecision::Exceeds
    } else {
        GrowthDecision::NotExceeds
    })
}
