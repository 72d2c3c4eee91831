//! Heterogeneous synthetic datasets.
//!
//! Each item draws its own `(beta, rho1, lambda0)`; its static attributes are
//! noisy views `[ln beta, rho1, ln lambda0]` followed by pure-noise columns, so
//! a regressor can learn `alpha` and the expected size from static features.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cascade::Cascade;
use crate::error::{Error, Result};
use crate::hawkes::params::HawkesExpParams;
use crate::sim::exp::run_exp;
use crate::sim::marks::{MarkLaw, MarkSampler};
use crate::sim::rng::item_rng;
use crate::sim::finish_cascade;
use crate::time::{DAY, HOUR};

/// Per-item parameter laws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Heterogeneity {
    /// `beta` is log-uniform on this range (1/seconds).
    pub beta_range: [f64; 2],
    /// `rho1` is uniform on this range.
    pub rho1_range: [f64; 2],
    /// Expected final size `lambda0/alpha` is lognormal with this median...
    pub size_median: f64,
    /// ...and this log-scale standard deviation.
    pub size_log_sd: f64,
    pub mark_law: MarkLaw,
    /// Squared coefficient of variation of `Z` for lognormal marks.
    pub lognormal_cv2: f64,
    /// Standard deviation of the Gaussian noise added to each informative attribute.
    pub attr_noise: f64,
    /// Number of trailing attributes that carry no signal.
    pub noise_attrs: usize,
}

impl Default for Heterogeneity {
    fn default() -> Self {
        Heterogeneity {
            beta_range: [1.0 / (2.0 * DAY), 1.0 / (2.0 * HOUR)],
            rho1_range: [0.2, 0.8],
            size_median: 300.0,
            size_log_sd: 1.0,
            mark_law: MarkLaw::Exponential,
            lognormal_cv2: 1.0,
            attr_noise: 0.25,
            noise_attrs: 2,
        }
    }
}

impl Heterogeneity {
    pub fn validate(&self) -> Result<()> {
        let [b0, b1] = self.beta_range;
        if !(b0 > 0.0 && b1 >= b0 && b1.is_finite()) {
            return Err(Error::Config(format!("invalid beta_range {:?}", self.beta_range)));
        }
        let [r0, r1] = self.rho1_range;
        if !(r0 >= 0.0 && r1 >= r0 && r1 < 1.0) {
            return Err(Error::Config(format!("invalid rho1_range {:?}", self.rho1_range)));
        }
        if !(self.size_median > 0.0 && self.size_log_sd >= 0.0 && self.attr_noise >= 0.0) {
            return Err(Error::Config("size_median must be > 0; size_log_sd and attr_noise >= 0".into()));
        }
        if self.mark_law == MarkLaw::LogNormal && !(self.lognormal_cv2 > 0.0) {
            return Err(Error::Config("lognormal_cv2 must be > 0".into()));
        }
        Ok(())
    }

    /// Number of static attributes each item carries.
    pub fn static_width(&self) -> usize {
        3 + self.noise_attrs
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BatchConfig {
    pub n_items: usize,
    pub seed: u64,
    /// Observation window per item, seconds.
    pub t_max: f64,
    pub max_events: usize,
    /// Creation time of item 0 (epoch seconds); item `i` is created `i * spacing` later.
    pub created_at_origin: f64,
    pub created_at_spacing: f64,
    pub heterogeneity: Heterogeneity,
}

impl Default for BatchConfig {
    fn default() -> Self {
        BatchConfig {
            n_items: 5000,
            seed: 1,
            t_max: 60.0 * DAY,
            max_events: 1_000_000,
            created_at_origin: 1.6e9,
            created_at_spacing: 60.0,
            heterogeneity: Heterogeneity::default(),
        }
    }
}

/// Simulated cascades with the parameters that generated them.
#[derive(Debug, Clone, Default)]
pub struct SyntheticBatch {
    pub cascades: Vec<Cascade>,
    pub params: Vec<HawkesExpParams>,
}

/// Simulates `config.n_items` items in parallel. Item `i` only consumes
/// random stream `i + 1` of `config.seed`, so output is independent of the
/// thread count.
pub fn simulate_batch(config: &BatchConfig) -> Result<SyntheticBatch> {
    let het = &config.heterogeneity;
    het.validate()?;
    if !(config.t_max > 0.0) || config.max_events == 0 {
        return Err(Error::Config("t_max must be > 0 and max_events >= 1".into()));
    }
    let items: Vec<(Cascade, HawkesExpParams)> = (0..config.n_items)
        .into_par_iter()
        .map(|i| simulate_item(config, i))
        .collect::<Result<_>>()?;
    let (cascades, params) = items.into_iter().unzip();
    Ok(SyntheticBatch { cascades, params })
}

fn simulate_item(config: &BatchConfig, index: usize) -> Result<(Cascade, HawkesExpParams)> {
    let het = &config.heterogeneity;
    let mut rng = item_rng(config.seed, index);
    let [b0, b1] = het.beta_range;
    let beta = (b0.ln() + rng.random::<f64>() * (b1.ln() - b0.ln())).exp();
    let [r0, r1] = het.rho1_range;
    let rho1 = r0 + rng.random::<f64>() * (r1 - r0);
    let z: f64 = StandardNormal.sample(&mut rng);
    let size = het.size_median * (het.size_log_sd * z).exp();
    let alpha = beta * (1.0 - rho1);
    let rho2 = het.mark_law.second_moment(rho1, het.lognormal_cv2);
    let params = HawkesExpParams::new(beta, rho1, rho2, alpha * size)?;

    let noise = |rng: &mut _| -> f64 {
        let e: f64 = StandardNormal.sample(rng);
        het.attr_noise * e
    };
    let mut attrs = vec![
        beta.ln() + noise(&mut rng),
        rho1 + noise(&mut rng),
        params.lambda0().ln() + noise(&mut rng),
    ];
    for _ in 0..het.noise_attrs {
        attrs.push(StandardNormal.sample(&mut rng));
    }

    let marks = MarkSampler::new(het.mark_law, rho1, rho2)?;
    let run = run_exp(beta, &marks, params.lambda0(), 0.0, config.t_max, config.max_events, false, &mut rng);
    let mut cascade = finish_cascade(format!("item-{index:06}"), run.events, run.truncated, config.t_max);
    cascade.created_at = config.created_at_origin + index as f64 * config.created_at_spacing;
    cascade.static_attrs = attrs;
    Ok((cascade, params))
}
