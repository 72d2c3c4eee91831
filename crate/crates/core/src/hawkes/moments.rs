//! Closed-form conditional moments and bounds.

use crate::cascade::Cascade;
use crate::error::{Error, Result};
use crate::hawkes::kernel::{one_minus_exp_neg, Kernel};
use crate::hawkes::params::HawkesExpParams;
use crate::time::Horizon;

/// `Λ(s, t)`: expected number of first-generation points in `[s, t]` induced
/// by the baseline and by the events before `s`.
///
/// The baseline follows the kernel shape, `lambda0(u) = lambda0 * phi(u) / phi(0)`,
/// which for the exponential kernel is `lambda0 * exp(-beta u)`. Each event
/// contributes `mark * phi`.
pub fn residual_mass<K: Kernel>(cascade: &Cascade, kernel: &K, lambda0: f64, s: f64, t: f64) -> Result<f64> {
    if !(s >= 0.0) || !(t >= s) {
        return Err(Error::domain(format!("residual mass needs 0 <= s <= t, got s={s}, t={t}")));
    }
    if t == s {
        return Ok(0.0);
    }
    if t.is_infinite() && kernel.total_mass().is_none() {
        return Err(Error::domain("kernel integral diverges; infinite horizon undefined"));
    }
    let phi_zero = kernel.value(0.0);
    let baseline = if lambda0 > 0.0 {
        lambda0 / phi_zero * (kernel.primitive(t) - kernel.primitive(s))
    } else {
        0.0
    };
    let excited: f64 = cascade
        .history(s)
        .iter()
        .map(|e| e.mark * (kernel.primitive(t - e.t) - kernel.primitive(s - e.t)))
        .sum();
    Ok(baseline + excited)
}

/// Conditional expected increment `E[N(s+delta) - N(s) | F_s]` for the
/// exponential kernel, `(1/alpha)(1 - exp(-alpha delta)) lambda(s)`.
pub fn expected_count_exp(lambda_s: f64, alpha: f64, delta: Horizon) -> Result<f64> {
    check_state(lambda_s, alpha, delta)?;
    Ok(lambda_s / alpha * one_minus_exp_neg(alpha * delta.seconds()))
}

/// Bounds `[Λ, Λ/(1-mu)]` on the conditional expected increment of any
/// stable Hawkes process.
pub fn count_bounds(residual: f64, mu: f64) -> Result<(f64, f64)> {
    if !(residual >= 0.0) {
        return Err(Error::domain(format!("residual mass must be >= 0, got {residual}")));
    }
    if !(mu >= 0.0) || mu >= 1.0 {
        return Err(Error::domain(format!("branching ratio {mu} outside [0, 1): unstable process")));
    }
    Ok((residual, residual / (1.0 - mu)))
}

/// Conditional variance of the increment, as published:
/// `(lambda/alpha) [beta² rho2 (1 - e^{-2 alpha delta}) + (1 - 2 beta rho1)(1 - e^{-alpha delta})
///  + 2 (beta² rho2 - beta rho1) alpha delta e^{-alpha delta}]`.
///
/// Exact only when `rho1 = 0`. The factor mixes `beta` (a rate) with
/// dimensionless moments, so the value changes with the time unit. Use
/// [`cluster_conditional_variance`] for the exact expression.
pub fn conditional_variance_exp(lambda_s: f64, params: &HawkesExpParams, delta: Horizon) -> Result<f64> {
    let alpha = params.alpha();
    check_state(lambda_s, alpha, delta)?;
    let (beta, rho1, rho2) = (params.beta(), params.rho1(), params.rho2());
    if delta.is_infinite() {
        return Ok(params.sigma_sq() * lambda_s / alpha);
    }
    let x = alpha * delta.seconds();
    let decay = (-x).exp();
    let bracket = beta * beta * rho2 * one_minus_exp_neg(2.0 * x)
        + (1.0 - 2.0 * beta * rho1) * one_minus_exp_neg(x)
        + 2.0 * (beta * beta * rho2 - beta * rho1) * x * decay;
    Ok(lambda_s / alpha * bracket)
}

/// Exact conditional variance of `N(s+delta) - N(s)` given `lambda(s)`:
///
/// `lambda / (alpha (1-rho1)²) [(1 - rho1²)(1 - E) + rho2 (1 - E²) - 2 (rho1 + sigma2) alpha delta E]`
/// with `E = exp(-alpha delta)`. Obtained from the moment equations of
/// `(lambda, N)`; its limit is `cluster_sigma_sq * lambda / alpha`.
pub fn cluster_conditional_variance(lambda_s: f64, params: &HawkesExpParams, delta: Horizon) -> Result<f64> {
    let alpha = params.alpha();
    check_state(lambda_s, alpha, delta)?;
    if delta.is_infinite() {
        return Ok(params.cluster_sigma_sq() * lambda_s / alpha);
    }
    let (rho1, rho2, sigma2) = (params.rho1(), params.rho2(), params.sigma2());
    let x = alpha * delta.seconds();
    let decay = (-x).exp();
    let bracket = (1.0 - rho1 * rho1) * one_minus_exp_neg(x) + rho2 * one_minus_exp_neg(2.0 * x)
        - 2.0 * (rho1 + sigma2) * x * decay;
    let d = 1.0 - rho1;
    Ok((lambda_s / (alpha * d * d) * bracket).max(0.0))
}

/// Horizon `c_gamma / alpha` at which the expected increment reaches the
/// fraction `gamma` of its limit, `c_gamma = ln(1/(1-gamma))`.
pub fn characteristic_time(gamma: f64, alpha: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::domain(format!("gamma must lie in (0, 1), got {gamma}")));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::domain(format!("alpha must be finite and > 0, got {alpha}")));
    }
    Ok(quantile_constant(gamma) / alpha)
}

/// `c_gamma = ln(1/(1-gamma))`.
pub fn quantile_constant(gamma: f64) -> f64 {
    -(-gamma).ln_1p()
}

/// Limit coefficient of variation of `N(t)` given `F_s` as `t → ∞`:
/// `Σ sqrt((1/E[N(∞)]) (1 - N(s)/E[N(∞)]))`.
pub fn asymptotic_cv(sigma_sq: f64, expected_final: f64, n_s: f64) -> Result<f64> {
    if !(expected_final > 0.0) || n_s < 0.0 || n_s > expected_final {
        return Err(Error::domain("need 0 <= N(s) <= E[N(inf)] and E[N(inf)] > 0"));
    }
    Ok((sigma_sq / expected_final * (1.0 - n_s / expected_final)).sqrt())
}

fn check_state(lambda_s: f64, alpha: f64, delta: Horizon) -> Result<()> {
    if !(lambda_s >= 0.0 && lambda_s.is_finite()) {
        return Err(Error::domain(format!("intensity must be finite and >= 0, got {lambda_s}")));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::domain(format!("alpha must be finite and > 0, got {alpha}")));
    }
    if let Horizon::Finite(d) = delta {
        if !(d >= 0.0) {
            return Err(Error::domain(format!("horizon must be >= 0, got {d}")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hawkes::kernel::{ExpKernel, ScaledKernel};
    use crate::hawkes::params::PowerLawKernelParams;
    use std::f64::consts::LN_2;

    fn fin(d: f64) -> Horizon {
        Horizon::Finite(d)
    }

    #[test]
    fn expected_count_examples() {
        assert_eq!(expected_count_exp(3.0, 1.0, fin(0.0)).unwrap(), 0.0);
        assert_eq!(expected_count_exp(2.0, 1.0, Horizon::Infinite).unwrap(), 2.0);
        assert!((expected_count_exp(1.0, 1.0, fin(LN_2)).unwrap() - 0.5).abs() < 1e-15);
        assert!(expected_count_exp(-1.0, 1.0, fin(1.0)).is_err());
    }

    #[test]
    fn bounds_examples() {
        assert_eq!(count_bounds(3.0, 0.0).unwrap(), (3.0, 3.0));
        assert_eq!(count_bounds(3.0, 0.5).unwrap(), (3.0, 6.0));
        assert!(count_bounds(3.0, 1.0).is_err());
        assert!(count_bounds(3.0, 1.5).is_err());
    }

    #[test]
    fn residual_mass_exponential_infinite_is_intensity_over_beta() {
        let p = HawkesExpParams::new(0.7, 0.4, 0.2, 2.0).unwrap();
        let c = Cascade::new(
            "x",
            [0.3, 1.1, 2.0, 2.5].iter().map(|&t| crate::Event::new(t, 0.5)).collect(),
            vec![],
        )
        .unwrap();
        // jumps are beta * Z, so the kernel carries the factor beta
        let k = ScaledKernel { inner: ExpKernel { beta: p.beta() }, scale: p.beta() };
        let s = 3.0;
        let lam = crate::hawkes::intensity::intensity_at(&c, &p, s).unwrap();
        let r = residual_mass(&c, &k, p.lambda0(), s, f64::INFINITY).unwrap();
        assert!((r - lam / p.beta()).abs() < 1e-12);
        assert_eq!(residual_mass(&c, &k, p.lambda0(), s, s).unwrap(), 0.0);
        assert!(residual_mass(&c, &k, p.lambda0(), s, 1.0).is_err());
    }

    #[test]
    fn residual_mass_rejects_divergent_kernel() {
        let k = PowerLawKernelParams::new(1.0, 1.0, -0.2, 1.0).unwrap();
        let c = Cascade::from_times("x", &[0.5]).unwrap();
        assert!(residual_mass(&c, &k, 0.0, 1.0, f64::INFINITY).is_err());
        assert!(residual_mass(&c, &k, 0.0, 1.0, 100.0).is_ok());
    }

    #[test]
    fn published_variance_examples() {
        let p = HawkesExpParams::new(1.3, 0.4, 0.3, 1.0).unwrap();
        assert_eq!(conditional_variance_exp(2.0, &p, fin(0.0)).unwrap(), 0.0);
        let lim = conditional_variance_exp(2.0, &p, Horizon::Infinite).unwrap();
        assert!((lim - p.sigma_sq() * 2.0 / p.alpha()).abs() < 1e-12);
        let far = conditional_variance_exp(2.0, &p, fin(1e4)).unwrap();
        assert!((far - lim).abs() < 1e-9);
        // Z == 0: variance equals the expectation for every horizon
        let q = HawkesExpParams::new(1.0, 0.0, 0.0, 1.0).unwrap();
        for d in [0.01, 0.3, 1.0, 5.0] {
            let v = conditional_variance_exp(4.0, &q, fin(d)).unwrap();
            let m = expected_count_exp(4.0, q.alpha(), fin(d)).unwrap();
            assert!((v - m).abs() < 1e-12);
        }
    }

    #[test]
    fn cluster_variance_limits() {
        let p = HawkesExpParams::new(0.01, 0.6, 0.5, 1.0).unwrap();
        let lim = cluster_conditional_variance(3.0, &p, Horizon::Infinite).unwrap();
        let far = cluster_conditional_variance(3.0, &p, fin(1e5)).unwrap();
        assert!((far - lim).abs() < 1e-9 * lim);
        assert_eq!(cluster_conditional_variance(3.0, &p, fin(0.0)).unwrap(), 0.0);
        // rho1 = 0 reduces to a Poisson count
        let q = HawkesExpParams::new(2.0, 0.0, 0.0, 1.0).unwrap();
        let v = cluster_conditional_variance(4.0, &q, fin(0.4)).unwrap();
        assert!((v - expected_count_exp(4.0, 2.0, fin(0.4)).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn cluster_variance_is_time_unit_invariant() {
        // same process expressed in seconds and in hours
        let sec = HawkesExpParams::new(1.0 / 3600.0, 0.5, 0.5, 10.0 / 3600.0).unwrap();
        let hr = HawkesExpParams::new(1.0, 0.5, 0.5, 10.0).unwrap();
        let a = cluster_conditional_variance(10.0 / 3600.0, &sec, fin(7200.0)).unwrap();
        let b = cluster_conditional_variance(10.0, &hr, fin(2.0)).unwrap();
        assert!((a - b).abs() < 1e-9 * b);
        let a = conditional_variance_exp(10.0 / 3600.0, &sec, fin(7200.0)).unwrap();
        let b = conditional_variance_exp(10.0, &hr, fin(2.0)).unwrap();
        assert!((a - b).abs() > 1e-3 * b, "published formula depends on the time unit");
    }

    #[test]
    fn characteristic_time_examples() {
        let g = 1.0 - (-1.0f64).exp();
        assert!((characteristic_time(g, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((characteristic_time(0.5, 2.0).unwrap() - LN_2 / 2.0).abs() < 1e-16);
        assert!(characteristic_time(0.0, 1.0).is_err());
        assert!(characteristic_time(1.0, 1.0).is_err());
    }

    #[test]
    fn asymptotic_cv_at_creation() {
        let v = asymptotic_cv(2.0, 100.0, 0.0).unwrap();
        assert!((v - (2.0f64).sqrt() / 10.0).abs() < 1e-15);
        assert_eq!(asymptotic_cv(2.0, 100.0, 100.0).unwrap(), 0.0);
    }
}
