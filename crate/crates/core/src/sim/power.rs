//! Ogata thinning for the power-law kernel.
//!
//! The kernel is nonincreasing, so between arrivals the intensity can only
//! decrease and its right-limit at the current time is a valid constant
//! majorant up to the next accepted event.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::cascade::Event;
use crate::hawkes::kernel::Kernel;
use crate::hawkes::params::PowerLawKernelParams;
use crate::sim::marks::MarkSampler;

/// Intensity `lambda0 phi(t)/phi0 + Σ p y_i phi(t - T_i)` over events with `T_i <= t`.
pub fn power_law_intensity(kernel: &PowerLawKernelParams, lambda0: f64, events: &[Event], t: f64) -> f64 {
    let baseline = lambda0 * kernel.value(t) / kernel.phi0;
    let excited: f64 = events
        .iter()
        .take_while(|e| e.t <= t)
        .map(|e| e.mark * kernel.value(t - e.t))
        .sum();
    baseline + kernel.p * excited
}

/// Simulates `(start, end]` given the history before `start`. Returns the new
/// events and whether the `max_events` cap stopped the run. `end` must be finite.
#[allow(clippy::too_many_arguments)]
pub fn run_power_law<R: Rng + ?Sized>(
    kernel: &PowerLawKernelParams,
    lambda0: f64,
    marks: &MarkSampler,
    history: &[Event],
    start: f64,
    end: f64,
    max_events: usize,
    rng: &mut R,
) -> (Vec<Event>, bool) {
    debug_assert!(end.is_finite());
    let mut all: Vec<Event> = history.to_vec();
    let n_hist = all.len();
    let mut t = start;
    loop {
        let bound = power_law_intensity(kernel, lambda0, &all, t);
        if !(bound > 0.0) {
            break;
        }
        let wait: f64 = Exp1.sample(rng);
        t += wait / bound;
        if t > end {
            break;
        }
        let u: f64 = rng.random();
        // events at exactly t cannot exist: every accepted time is strictly later
        if u * bound <= power_law_intensity(kernel, lambda0, &all, t) {
            if all.len() - n_hist == max_events {
                return (all.split_off(n_hist), true);
            }
            all.push(Event::new(t, marks.sample(rng)));
        }
    }
    (all.split_off(n_hist), false)
}
