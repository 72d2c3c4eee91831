use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::window::{SlidingWindowCounter, DEFAULT_BUCKETS};

/// Number of count milestones (`1, 2, 4, ..., 2^63`).
const MILESTONES: usize = 64;

/// Constant-memory streaming summary of one item's events.
///
/// Tracks the exact event count, the running sum of event times, a bucketed
/// window of length `d` for the velocity `count([s-d, s]) / d`, and the times
/// at which the count first reached each power of two. The latter give
/// approximate quantile-crossing times `T_gamma(s)`: the first time the count
/// reached `gamma * N(s)`, interpolated in `log2(count)` between milestones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VelocityTracker {
    window: SlidingWindowCounter,
    gammas: Vec<f64>,
    last_t: f64,
    total: u64,
    sum_times: f64,
    milestones: Vec<f64>,
}

impl VelocityTracker {
    pub fn new(window: f64, buckets: usize, gammas: &[f64]) -> Result<Self> {
        if let Some(g) = gammas.iter().find(|g| !(**g > 0.0 && **g < 1.0)) {
            return Err(Error::param(format!("quantile levels must lie in (0, 1), got {g}")));
        }
        Ok(VelocityTracker {
            window: SlidingWindowCounter::new(window, buckets)?,
            gammas: gammas.to_vec(),
            last_t: 0.0,
            total: 0,
            sum_times: 0.0,
            milestones: vec![f64::NAN; MILESTONES],
        })
    }

    /// Tracker with the default 64 buckets and quantile levels {0.5, 0.9}.
    pub fn with_window(window: f64) -> Result<Self> {
        VelocityTracker::new(window, DEFAULT_BUCKETS, &[0.5, 0.9])
    }

    /// Records an event. Timestamps must be nondecreasing.
    pub fn observe(&mut self, t: f64, _mark: f64) -> Result<()> {
        if !(t >= self.last_t) || !t.is_finite() {
            return Err(Error::OutOfOrder { t, last: self.last_t });
        }
        self.last_t = t;
        self.total += 1;
        self.sum_times += t;
        if self.total.is_power_of_two() {
            self.milestones[self.total.trailing_zeros() as usize] = t;
        }
        self.window.observe(t);
        Ok(())
    }

    /// Velocity estimate of the intensity at `s`: events in `[s-d, s]` over `d`.
    pub fn velocity(&self, s: f64) -> f64 {
        self.window.rate(s)
    }

    pub fn window_count(&self, s: f64) -> u64 {
        self.window.count(s)
    }

    pub fn window_length(&self) -> f64 {
        self.window.window()
    }

    pub fn total_count(&self) -> u64 {
        self.total
    }

    pub fn sum_times(&self) -> f64 {
        self.sum_times
    }

    pub fn last_time(&self) -> f64 {
        self.last_t
    }

    /// Mean event time, 0 with no events.
    pub fn mean_time(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.sum_times / self.total as f64
        }
    }

    /// Mean-value estimate `N / Σ T_i` from the running sums.
    pub fn alpha_mean(&self) -> Result<f64> {
        if self.total == 0 {
            return Err(Error::InsufficientData("no events observed".into()));
        }
        if !(self.sum_times > 0.0) {
            return Err(Error::domain("all event times are zero: mean-value estimator undefined"));
        }
        Ok(self.total as f64 / self.sum_times)
    }

    /// Approximate first time the count reached `gamma * N(s)`.
    pub fn quantile_time(&self, gamma: f64) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        let n = self.total as f64;
        let target = (gamma * n).max(1.0);
        let lt = target.log2();
        let k = (lt.floor() as usize).min(MILESTONES - 1);
        let t_k = self.milestones[k];
        let (t_next, l_next) = if k + 1 < MILESTONES && (1u64 << (k + 1)) <= self.total {
            (self.milestones[k + 1], (k + 1) as f64)
        } else {
            (self.last_t, n.log2())
        };
        if l_next <= k as f64 {
            return t_k;
        }
        let frac = ((lt - k as f64) / (l_next - k as f64)).clamp(0.0, 1.0);
        t_k + frac * (t_next - t_k)
    }

    /// Crossing times for the configured quantile levels.
    pub fn quantile_times(&self) -> Vec<f64> {
        self.gammas.iter().map(|&g| self.quantile_time(g)).collect()
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    /// Bytes held by this tracker; independent of the number of events.
    pub fn memory_bytes(&self) -> usize {
        std::mem::size_of::<Self>() - std::mem::size_of::<SlidingWindowCounter>()
            + self.window.memory_bytes()
            + self.gammas.capacity() * 8
            + self.milestones.capacity() * 8
    }
}
