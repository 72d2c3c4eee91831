//! Closed-form mathematics of self-exciting point processes.
//!
//! Exponential kernel `phi(x) = exp(-beta x)` with baseline
//! `lambda0 exp(-beta t)` and jumps `beta Z`:
//!
//! ```text
//! lambda(t)                  = lambda0 e^{-beta t} + Σ_{T_i < t} beta Z_i e^{-beta (t - T_i)}
//! E[N(s+δ) - N(s) | F_s]     = (1/alpha) (1 - e^{-alpha δ}) lambda(s),   alpha = beta (1 - rho1)
//! ```
//!
//! Everything here is pure and thread-safe.

pub mod intensity;
pub mod kernel;
pub mod moments;
pub mod params;

pub use intensity::{intensity_at, intensity_recursive, IntensityRecursion};
pub use kernel::{exp_model_kernel, kernel_exp, kernel_power_law, one_minus_exp_neg, ExpKernel, Kernel, ScaledKernel};
pub use moments::{
    asymptotic_cv, characteristic_time, cluster_conditional_variance, conditional_variance_exp, count_bounds,
    expected_count_exp, quantile_constant, residual_mass,
};
pub use params::{HawkesExpParams, PowerLawKernelParams, MIN_ALPHA};
