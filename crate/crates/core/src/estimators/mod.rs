//! Constant-state estimators of the growth exponent and the current intensity.

mod alpha;
mod tracker;
mod window;

pub use alpha::{
    alpha_mean, alpha_mean_times, alpha_quantile, quantile_crossing_time,
    remaining_integral_identity, AlphaEstimator, AlphaMethod,
};
pub use tracker::VelocityTracker;
pub use window::{SlidingWindowCounter, DEFAULT_BUCKETS};
