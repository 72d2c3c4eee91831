//! Reinforced Poisson process with a lognormal relaxation density.
//!
//! Intensity `p f(t) N(t)`. Fitting maximizes the likelihood of the events
//! after the first, conditioned on the first:
//! `Σ_{i>=2} [ln p + ln f(T_i) + ln(i-1)] - p (N F(s) - Σ F(T_i))`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::time::{Duration, Instant};

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::erf::erfc;

use crate::baselines::optim::{minimize, Options};
use crate::cascade::Cascade;
use crate::error::{Error, Result};
use crate::time::Horizon;

/// Event times are floored here before taking logarithms.
pub const TIME_FLOOR: f64 = 1e-3;

const LN_P_BOUNDS: [f64; 2] = [-13.815510557964274, 9.210340371976184]; // ln 1e-6, ln 1e4
const MU_BOUNDS: [f64; 2] = [-10.0, 25.0];
const LN_SIGMA_BOUNDS: [f64; 2] = [-2.995732273553991, 2.995732273553991]; // ln 0.05, ln 20

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RppParams {
    pub p: f64,
    pub mu_ln: f64,
    pub sigma_ln: f64,
}

impl RppParams {
    pub fn new(p: f64, mu_ln: f64, sigma_ln: f64) -> Result<Self> {
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::param(format!("rate p must be finite and > 0, got {p}")));
        }
        if !mu_ln.is_finite() {
            return Err(Error::param("lognormal location must be finite"));
        }
        if !(sigma_ln > 0.0 && sigma_ln.is_finite()) {
            return Err(Error::param(format!("lognormal scale must be finite and > 0, got {sigma_ln}")));
        }
        Ok(RppParams { p, mu_ln, sigma_ln })
    }

    /// Lognormal CDF `F(t)`; `F(inf) = 1`.
    pub fn cdf(&self, t: f64) -> f64 {
        if t == f64::INFINITY {
            return 1.0;
        }
        normal_cdf((t.max(TIME_FLOOR).ln() - self.mu_ln) / self.sigma_ln)
    }
}

#[inline]
fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z * FRAC_1_SQRT_2)
}

#[inline]
fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RppFitConfig {
    pub max_iter: usize,
    pub tol: f64,
    pub restarts: usize,
}

impl Default for RppFitConfig {
    fn default() -> Self {
        RppFitConfig { max_iter: 500, tol: 1e-8, restarts: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RppFit {
    pub params: RppParams,
    pub log_likelihood: f64,
    /// Total optimizer iterations over all restarts.
    pub iterations: usize,
    pub wall_time: Duration,
    /// Whether the best restart met the tolerance.
    pub converged: bool,
}

/// Conditional log-likelihood and its gradient in `(ln p, mu, ln sigma)`.
struct Likelihood<'a> {
    /// Log event times, first included.
    log_t: &'a [f64],
    log_s: f64,
    /// `Σ_{i>=2} ln(i-1) - ln T_i - 0.5 ln(2 pi)`.
    constant: f64,
}

impl<'a> Likelihood<'a> {
    fn new(log_t: &'a [f64], s: f64) -> Self {
        let n = log_t.len();
        let constant = (2..=n).map(|i| ((i - 1) as f64).ln() - log_t[i - 1] - 0.5 * (2.0 * PI).ln()).sum();
        Likelihood { log_t, log_s: s.max(TIME_FLOOR).ln(), constant }
    }

    fn eval(&self, x: &[f64; 3]) -> (f64, [f64; 3]) {
        let (p, mu, sigma) = (x[0].exp(), x[1], x[2].exp());
        let n = self.log_t.len();
        let zs = (self.log_s - mu) / sigma;
        let (fs, phis) = (normal_cdf(zs), normal_pdf(zs));
        let (mut d, mut d_mu, mut d_sig) = (0.0, 0.0, 0.0);
        let (mut ll_f, mut g_mu, mut g_sig) = (0.0, 0.0, 0.0);
        for (i, &lt) in self.log_t.iter().enumerate() {
            let z = (lt - mu) / sigma;
            let phi = normal_pdf(z);
            d += fs - normal_cdf(z);
            d_mu += (phi - phis) / sigma;
            d_sig += phi * z - phis * zs;
            if i > 0 {
                ll_f += -sigma.ln() - 0.5 * z * z;
                g_mu += z / sigma;
                g_sig += z * z - 1.0;
            }
        }
        let m = (n - 1) as f64;
        let ll = m * p.ln() + ll_f + self.constant - p * d;
        let grad = [m - p * d, g_mu - p * d_mu, g_sig - p * d_sig];
        (ll, grad)
    }
}

fn check_times(cascade: &Cascade, s: f64) -> Result<Vec<f64>> {
    let hist = cascade.history(s);
    if hist.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "reinforced Poisson fit needs at least 2 events before s, got {}",
            hist.len()
        )));
    }
    Ok(hist.iter().map(|e| e.t.max(TIME_FLOOR).ln()).collect())
}

/// Maximum-likelihood fit on the events of `cascade` before `s`.
pub fn rpp_fit(cascade: &Cascade, s: f64, config: &RppFitConfig) -> Result<RppFit> {
    let start = Instant::now();
    let log_t = check_times(cascade, s)?;
    let lik = Likelihood::new(&log_t, s);
    let n = log_t.len() as f64;
    let tail = &log_t[1..];
    let mean = tail.iter().sum::<f64>() / tail.len() as f64;
    let sd = (tail.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / tail.len() as f64).sqrt().clamp(0.3, 5.0);
    let starts = [(mean, sd), (mean + 2.0 * sd, 2.0 * sd), (mean - sd, 0.5 * sd)];
    let lo = [LN_P_BOUNDS[0], MU_BOUNDS[0], LN_SIGMA_BOUNDS[0]];
    let hi = [LN_P_BOUNDS[1], MU_BOUNDS[1], LN_SIGMA_BOUNDS[1]];
    let opts = Options { max_iter: config.max_iter, tol: config.tol };
    let mut best: Option<(f64, [f64; 3], bool)> = None;
    let mut iterations = 0;
    for &(mu0, sd0) in starts.iter().cycle().take(config.restarts.max(1)) {
        // rate initialized at its profile maximum (n - 1) / D; at p = 1 the
        // first gradient component is (n - 1) - D
        let (_, g0) = lik.eval(&[0.0, mu0, sd0.ln()]);
        let d = (n - 1.0) - g0[0];
        let ln_p0 = if d > 0.0 { ((n - 1.0) / d).ln() } else { 0.0 };
        let x0 = [ln_p0, mu0, sd0.ln()];
        let out = minimize(
            |x| {
                let (ll, g) = lik.eval(x);
                (-ll / n, [-g[0] / n, -g[1] / n, -g[2] / n])
            },
            x0,
            lo,
            hi,
            &opts,
        );
        iterations += out.iterations;
        if best.is_none_or(|b| out.value < b.0) {
            best = Some((out.value, out.x, out.converged));
        }
    }
    let (value, x, converged) = best.expect("at least one restart");
    Ok(RppFit {
        params: RppParams { p: x[0].exp(), mu_ln: x[1], sigma_ln: x[2].exp() },
        log_likelihood: -value * n,
        iterations,
        wall_time: start.elapsed(),
        converged,
    })
}

/// Conditional log-likelihood of `params` on the events before `s`.
pub fn rpp_log_likelihood(cascade: &Cascade, s: f64, params: &RppParams) -> Result<f64> {
    let log_t = check_times(cascade, s)?;
    Ok(Likelihood::new(&log_t, s).eval(&[params.p.ln(), params.mu_ln, params.sigma_ln.ln()]).0)
}

/// Expected count at `s + delta`: `N_s exp(p (F(s + delta) - F(s)))`.
pub fn rpp_predict(params: &RppParams, n_s: f64, s: f64, delta: Horizon) -> f64 {
    let t = s + delta.seconds();
    n_s * (params.p * (params.cdf(t) - params.cdf(s))).exp()
}

/// Simulates an RPP path from a first event at `t_first` until `t_end`:
/// a Yule process of rate `p i` in the time change `u = F(t)`.
pub fn rpp_simulate<R: Rng + ?Sized>(
    params: &RppParams,
    t_first: f64,
    t_end: f64,
    max_events: usize,
    rng: &mut R,
) -> Result<(Vec<f64>, bool)> {
    if !(t_first >= 0.0 && t_end >= t_first) {
        return Err(Error::param("need 0 <= t_first <= t_end"));
    }
    let normal = Normal::new(params.mu_ln, params.sigma_ln).map_err(|e| Error::param(e.to_string()))?;
    let u_end = params.cdf(t_end);
    let mut u = params.cdf(t_first);
    let mut times = vec![t_first];
    while times.len() < max_events {
        let w: f64 = rng.sample(rand_distr::Exp1);
        u += w / (params.p * times.len() as f64);
        if u >= u_end {
            return Ok((times, false));
        }
        let t = normal.inverse_cdf(u).exp().max(*times.last().unwrap());
        times.push(t);
    }
    Ok((times, true))
}
