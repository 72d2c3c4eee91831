//! Simulation of self-exciting cascades.
//!
//! Used both to generate synthetic training data and as the Monte-Carlo
//! oracle for the closed forms in [`crate::hawkes`].

pub mod batch;
pub mod exp;
pub mod marks;
pub mod power;
pub mod rng;

use serde::{Deserialize, Serialize};

use crate::cascade::{Cascade, Event};
use crate::error::{Error, Result};
use crate::hawkes::kernel::Kernel;
use crate::hawkes::params::{HawkesExpParams, PowerLawKernelParams};

pub use batch::{simulate_batch, BatchConfig, Heterogeneity, SyntheticBatch};
pub use exp::{run_exp, ExpRun};
pub use marks::{MarkLaw, MarkSampler};
pub use power::{power_law_intensity, run_power_law};
pub use rng::{item_rng, rng_from_seed, split_rng, SimRng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelConfig {
    Exponential {
        params: HawkesExpParams,
    },
    PowerLaw {
        kernel: PowerLawKernelParams,
        /// Initial intensity; the baseline decays with the kernel shape.
        lambda0: f64,
        mark_mean: f64,
        mark_second_moment: f64,
    },
}

impl KernelConfig {
    /// Expected number of direct offspring per event.
    pub fn branching_ratio(&self) -> Option<f64> {
        match self {
            KernelConfig::Exponential { params } => Some(params.mu()),
            KernelConfig::PowerLaw { kernel, mark_mean, .. } => kernel.total_mass().map(|m| kernel.p * mark_mean * m),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub kernel: KernelConfig,
    #[serde(default)]
    pub mark_law: MarkLaw,
    /// Simulation horizon in seconds.
    pub t_max: f64,
    pub max_events: usize,
    pub seed: u64,
    #[serde(default)]
    pub track_generations: bool,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_max > 0.0) {
            return Err(Error::param(format!("t_max must be > 0, got {}", self.t_max)));
        }
        if self.max_events == 0 {
            return Err(Error::param("max_events must be >= 1"));
        }
        match &self.kernel {
            KernelConfig::Exponential { .. } => {}
            KernelConfig::PowerLaw { kernel, lambda0, .. } => {
                kernel.validate()?;
                if !self.t_max.is_finite() {
                    return Err(Error::param("power-law simulation needs a finite t_max"));
                }
                if !(*lambda0 >= 0.0) {
                    return Err(Error::param("lambda0 must be >= 0"));
                }
            }
        }
        match self.kernel.branching_ratio() {
            Some(m) if m < 1.0 => Ok(()),
            Some(m) => Err(Error::param(format!("branching ratio {m} >= 1: unstable process"))),
            None => Err(Error::param("kernel integral diverges: unstable process")),
        }
    }

    fn mark_sampler(&self) -> Result<MarkSampler> {
        match &self.kernel {
            KernelConfig::Exponential { params } => MarkSampler::new(self.mark_law, params.rho1(), params.rho2()),
            KernelConfig::PowerLaw { mark_mean, mark_second_moment, .. } => {
                MarkSampler::new(self.mark_law, *mark_mean, *mark_second_moment)
            }
        }
    }
}

/// A simulated cascade with optional branching bookkeeping.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub cascade: Cascade,
    /// Event counts per generation (exponential kernel only).
    pub generations: Option<Vec<usize>>,
}

/// Simulates one cascade on `[0, t_max]`. Deterministic in `config.seed`.
pub fn simulate(config: &SimConfig) -> Result<Cascade> {
    simulate_traced(config).map(|s| s.cascade)
}

pub fn simulate_traced(config: &SimConfig) -> Result<Simulation> {
    config.validate()?;
    let marks = config.mark_sampler()?;
    let mut rng = rng_from_seed(config.seed);
    let (events, truncated, generations) = match &config.kernel {
        KernelConfig::Exponential { params } => {
            let run = run_exp(
                params.beta(),
                &marks,
                params.lambda0(),
                0.0,
                config.t_max,
                config.max_events,
                config.track_generations,
                &mut rng,
            );
            (run.events, run.truncated, run.generations)
        }
        KernelConfig::PowerLaw { kernel, lambda0, .. } => {
            let (ev, tr) = run_power_law(kernel, *lambda0, &marks, &[], 0.0, config.t_max, config.max_events, &mut rng);
            (ev, tr, None)
        }
    };
    Ok(Simulation {
        cascade: finish_cascade(format!("sim-{}", config.seed), events, truncated, config.t_max),
        generations,
    })
}

pub(crate) fn finish_cascade(item_id: String, events: Vec<Event>, truncated: bool, t_max: f64) -> Cascade {
    Cascade {
        item_id,
        created_at: 0.0,
        events,
        static_attrs: Vec::new(),
        truncated,
        observed_until: t_max.is_finite().then_some(t_max),
    }
}
