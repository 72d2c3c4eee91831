//! Exact simulation of the exponential-kernel process.
//!
//! Between events the intensity only decays, so the next arrival can be drawn
//! by inverting the compensator: with `E ~ Exp(1)`, no further event occurs if
//! `E >= lambda/beta`; otherwise the waiting time is `-ln(1 - beta E/lambda)/beta`
//! and the pre-jump intensity is exactly `lambda - beta E`.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::cascade::Event;
use crate::sim::marks::MarkSampler;

/// Result of running the process forward from a known intensity.
#[derive(Debug, Clone, Default)]
pub struct ExpRun {
    pub events: Vec<Event>,
    pub truncated: bool,
    /// Events per generation (index 0: triggered by the initial intensity),
    /// when generation tracking was requested.
    pub generations: Option<Vec<usize>>,
}

/// Runs the process on `(start, end]` given `lambda(start) = lambda_start`.
///
/// Cost is O(1) per event, plus O(#generations) when `track_generations` is set:
/// each event is attributed to the generation whose intensity component
/// produced it, with probability proportional to that component.
#[allow(clippy::too_many_arguments)]
pub fn run_exp<R: Rng + ?Sized>(
    beta: f64,
    marks: &MarkSampler,
    lambda_start: f64,
    start: f64,
    end: f64,
    max_events: usize,
    track_generations: bool,
    rng: &mut R,
) -> ExpRun {
    let mut out = ExpRun::default();
    let mut lambda = lambda_start;
    let mut t = start;
    // components[k]: intensity contributed by generation k-1 (0: initial)
    let mut components = vec![lambda_start];
    let mut counts: Vec<usize> = Vec::new();
    while lambda > 0.0 {
        let e: f64 = Exp1.sample(rng);
        let budget = lambda / beta;
        if e >= budget {
            break;
        }
        let wait = -(-e / budget).ln_1p() / beta;
        if t + wait > end {
            break;
        }
        if out.events.len() == max_events {
            out.truncated = true;
            break;
        }
        t += wait;
        let pre_jump = (lambda - beta * e).max(0.0);
        let z = marks.sample(rng);
        if track_generations {
            let decay = if lambda > 0.0 { pre_jump / lambda } else { 0.0 };
            for c in components.iter_mut() {
                *c *= decay;
            }
            let total: f64 = components.iter().sum();
            let mut pick = rng.random::<f64>() * total;
            let mut gen = components.len() - 1;
            for (k, c) in components.iter().enumerate() {
                if pick < *c {
                    gen = k;
                    break;
                }
                pick -= c;
            }
            if counts.len() <= gen {
                counts.resize(gen + 1, 0);
            }
            counts[gen] += 1;
            if components.len() <= gen + 1 {
                components.resize(gen + 2, 0.0);
            }
            components[gen + 1] += beta * z;
        }
        lambda = pre_jump + beta * z;
        out.events.push(Event::new(t, z));
    }
    if track_generations {
        out.generations = Some(counts);
    }
    out
}
