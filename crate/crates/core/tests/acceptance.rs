//! Acceptance suite. Prints one `criterion N: PASS|FAIL ...` line per
//! criterion. Pass criterion numbers as arguments to run a subset.
//!
//! The process exits nonzero when a criterion fails, except for failures
//! listed in `KNOWN_FAILURES`, which are still reported as FAIL.

use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;

use hawkes_horizon::baselines::{RppFitConfig, SeismicConfig};
use hawkes_horizon::estimators::{alpha_mean, alpha_quantile, remaining_integral_identity};
use hawkes_horizon::eval::{
    bench_prediction_cost, hwk_name, kendall_tau, loglog_slope, mape, max_min_ratio, mean_at, pair_counts, rmse, run_experiment,
    split_indices, BenchConfig, Experiment, ExperimentConfig, ModelKind, TrainedModel, HF_DENSE_NAME, HF_SPARSE_NAME, PB_NAME,
};
use hawkes_horizon::forecast::{
    extract_features, relative_growth_decision, Aggregation, FeatureConfig, FeatureSchema, ForecastModel, GrowthDecision,
    GrowthRule, ModelConfig, Regressor,
};
use hawkes_horizon::hawkes::{
    cluster_conditional_variance, conditional_variance_exp, expected_count_exp, intensity_at, residual_mass,
    HawkesExpParams, PowerLawKernelParams, ScaledKernel,
};
use hawkes_horizon::sim::{item_rng, rng_from_seed, run_exp, run_power_law, simulate_batch, BatchConfig, MarkLaw, MarkSampler};
use hawkes_horizon::time::{Horizon, DAY, HOUR};
use hawkes_horizon::{Cascade, Event};

/// Criteria whose failure is analysed and expected.
const KNOWN_FAILURES: &[u32] = &[1];

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn cascade(events: Vec<Event>, attrs: Vec<f64>) -> Cascade {
    Cascade::new("acc", events, attrs).expect("valid cascade")
}

struct Moments {
    mean: f64,
    var: f64,
    se_mean: f64,
    se_var: f64,
}

fn moments(xs: &[f64]) -> Moments {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let m2 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
    let var = m2 * n / (n - 1.0);
    Moments { mean, var, se_mean: (var / n).sqrt(), se_var: ((m4 - m2 * m2).max(0.0) / n).sqrt() }
}

// ---------------------------------------------------------------- criterion 1

fn criterion_1() -> Verdict {
    const CONFIGS: usize = 20;
    const RUNS: usize = 10_000;
    let mut rng = rng_from_seed(101);
    let (mut mean_ok, mut var_ok, mut cluster_ok, mut checks) = (0, 0, 0, 0);
    let mut worst_var = (0.0f64, String::new());
    for cfg in 0..CONFIGS {
        let beta = (rng.random_range(0.1f64.ln()..10.0f64.ln())).exp();
        let rho1 = rng.random_range(0.1..0.8);
        let law = [MarkLaw::Constant, MarkLaw::Exponential, MarkLaw::LogNormal][cfg % 3];
        let rho2 = law.second_moment(rho1, rng.random_range(0.2..1.5));
        let alpha = beta * (1.0 - rho1);
        let lambda0 = alpha * rng.random_range(5.0..50.0);
        let params = HawkesExpParams::new(beta, rho1, rho2, lambda0).unwrap();
        let sampler = MarkSampler::new(law, rho1, rho2).unwrap();
        let deltas = [0.1 / alpha, 1.0 / alpha, 10.0 / alpha];
        let counts: Vec<[f64; 3]> = (0..RUNS)
            .into_par_iter()
            .map(|r| {
                let mut g = item_rng(1_000 + cfg as u64, r);
                let run = run_exp(beta, &sampler, lambda0, 0.0, deltas[2], usize::MAX, false, &mut g);
                let mut c = [0.0; 3];
                for (k, d) in deltas.iter().enumerate() {
                    c[k] = run.events.iter().filter(|e| e.t <= *d).count() as f64;
                }
                c
            })
            .collect();
        for (k, &d) in deltas.iter().enumerate() {
            let xs: Vec<f64> = counts.iter().map(|c| c[k]).collect();
            let m = moments(&xs);
            let h = Horizon::Finite(d);
            let e = expected_count_exp(lambda0, alpha, h).unwrap();
            let v_pub = conditional_variance_exp(lambda0, &params, h).unwrap();
            let v_clu = cluster_conditional_variance(lambda0, &params, h).unwrap();
            checks += 1;
            mean_ok += ((m.mean - e).abs() <= 3.0 * m.se_mean) as usize;
            let z_pub = (m.var - v_pub).abs() / m.se_var;
            var_ok += (z_pub <= 3.0) as usize;
            cluster_ok += ((m.var - v_clu).abs() <= 3.0 * m.se_var) as usize;
            if z_pub > worst_var.0 {
                worst_var = (
                    z_pub,
                    format!("beta={beta:.3} rho1={rho1:.2} delta={:.1}/alpha: var {:.2} vs published {:.2}", d * alpha, m.var, v_pub),
                );
            }
        }
    }
    let pass = mean_ok == checks && var_ok == checks;
    verdict(
        pass,
        format!(
            "mean {mean_ok}/{checks}, published variance {var_ok}/{checks} (worst {:.0} SE: {}), cluster variance {cluster_ok}/{checks}",
            worst_var.0, worst_var.1
        ),
    )
}

// ---------------------------------------------------------------- criterion 2

fn criterion_2() -> Verdict {
    const RUNS: usize = 1_000;
    // (theta, tau_cut, mu, lambda0, s, t)
    let configs = [
        (0.5, 1.0, 0.3, 4.0, 2.0, 20.0),
        (0.8, 2.0, 0.5, 2.0, 5.0, 40.0),
        (1.2, 1.0, 0.6, 3.0, 3.0, 30.0),
        (2.0, 0.5, 0.7, 2.0, 1.0, 10.0),
        (0.3, 1.0, 0.4, 2.0, 4.0, 100.0),
    ];
    let marks = MarkSampler::new(MarkLaw::Exponential, 1.0, 2.0).unwrap();
    let mut ok = 0;
    let mut details = Vec::new();
    for (c, &(theta, tau, mu, lambda0, s, t)) in configs.iter().enumerate() {
        let kernel = PowerLawKernelParams::normalized(tau, theta, mu).unwrap();
        let mut g = item_rng(202, c);
        let (history, _) = run_power_law(&kernel, lambda0, &marks, &[], 0.0, s, usize::MAX, &mut g);
        let counts: Vec<f64> = (0..RUNS)
            .into_par_iter()
            .map(|r| {
                let mut g = item_rng(2_000 + c as u64, r);
                let (ev, truncated) = run_power_law(&kernel, lambda0, &marks, &history, s, t, 1_000_000, &mut g);
                assert!(!truncated);
                ev.len() as f64
            })
            .collect();
        let m = moments(&counts);
        let hist = cascade(history.clone(), vec![]);
        let scaled = ScaledKernel { inner: kernel, scale: kernel.p };
        let lam = residual_mass(&hist, &scaled, lambda0, s, t).unwrap();
        let upper = lam / (1.0 - mu);
        let inside = m.mean >= lam - 3.0 * m.se_mean && m.mean <= upper + 3.0 * m.se_mean;
        ok += inside as usize;
        details.push(format!("[{:.2}, {:.2}] mean {:.2} (se {:.2})", lam, upper, m.mean, m.se_mean));
    }
    verdict(ok == configs.len(), format!("{ok}/{} configs within bounds: {}", configs.len(), details.join(" ")))
}

// ---------------------------------------------------------------- criterion 3

fn criterion_3() -> Verdict {
    let mut rng = rng_from_seed(303);
    let mut worst_identity = 0.0f64;
    for _ in 0..1_000 {
        let n = rng.random_range(0..2_000usize);
        let scale = (rng.random_range(-5.0f64..10.0)).exp();
        let mut times: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * scale).collect();
        times.sort_by(f64::total_cmp);
        let c = Cascade::from_times("id", &times).unwrap();
        let (lhs, rhs) = remaining_integral_identity(&c);
        let rel = if rhs == 0.0 { lhs.abs() } else { (lhs - rhs).abs() / rhs };
        worst_identity = worst_identity.max(rel);
    }
    let identity_ok = worst_identity <= 1e-6;

    // alpha = 1, expected final size 1000
    let (beta, rho1, n) = (2.0, 0.5, 1_000.0);
    let alpha = beta * (1.0 - rho1);
    let marks = MarkSampler::new(MarkLaw::Exponential, rho1, 2.0 * rho1 * rho1).unwrap();
    let sims: Vec<Cascade> = (0..1_000)
        .into_par_iter()
        .map(|r| {
            let mut g = item_rng(3_003, r);
            let run = run_exp(beta, &marks, alpha * n, 0.0, f64::INFINITY, usize::MAX, false, &mut g);
            cascade(run.events, vec![])
        })
        .collect();
    let mut rel_err: Vec<f64> = sims.iter().map(|c| (alpha_mean(c, 0.0).unwrap() - alpha).abs() / alpha).collect();
    rel_err.sort_by(f64::total_cmp);
    let median_err = rel_err[rel_err.len() / 2];
    let mean_ok = median_err <= 0.10;

    let gamma = 1.0 - 1.0 / n;
    let q: Vec<f64> = sims.iter().map(|c| alpha_quantile(c, gamma, 0.0, true).unwrap()).collect();
    let mean_q = q.iter().sum::<f64>() / q.len() as f64;
    let bound = 0.9 * alpha / (n.ln() + 1.0);
    let quantile_ok = mean_q >= bound;
    verdict(
        identity_ok && mean_ok && quantile_ok,
        format!(
            "identity worst rel {worst_identity:.1e}; mean-value median rel err {median_err:.3}; quantile E[alpha_hat] {mean_q:.4} vs bound {bound:.4}"
        ),
    )
}

// ---------------------------------------------------- criteria 4, 6 and 7 share one experiment

struct Shared {
    cascades: Vec<Cascade>,
    experiment: Experiment,
    config: ExperimentConfig,
    elapsed: f64,
}

fn shared_experiment() -> Shared {
    let start = Instant::now();
    let batch = simulate_batch(&BatchConfig::default()).unwrap();
    let config = ExperimentConfig { seed: 1, ..ExperimentConfig::default() };
    let experiment = run_experiment(&batch.cascades, &config).unwrap();
    Shared { cascades: batch.cascades, experiment, config, elapsed: start.elapsed().as_secs_f64() }
}

fn criterion_4(shared: &Shared) -> Verdict {
    let fc = &shared.experiment.feature_config;
    let (_, test) = split_indices(shared.cascades.len(), shared.config.test_every);
    let mut rng = rng_from_seed(404);
    let mut checks = 0;
    let mut mismatches = 0;
    let mut n_models = 0;
    for m in &shared.experiment.models {
        let TrainedModel::Hwk(_, model) = m else { continue };
        n_models += 1;
        for _ in 0..1_000 {
            let c = &shared.cascades[test[rng.random_range(0..test.len())]];
            let s = (rng.random_range((10.0f64).ln()..(7.0 * DAY).ln())).exp();
            let x = extract_features(c, s, fc).unwrap();
            let n_s = c.count_before(s) as f64;
            for (i, &h) in model.horizons.iter().enumerate() {
                let expected = n_s + (model.point_output(&x, i).exp() - model.log_offset).max(0.0);
                let got = model.predict_from_reference(&x, n_s, h, i).unwrap();
                checks += 1;
                mismatches += (got.to_bits() != expected.to_bits()) as usize;
                if model.n_horizons() == 1 {
                    let single = model.predict_single(&x, n_s, h).unwrap();
                    checks += 1;
                    mismatches += (single.to_bits() != expected.to_bits()) as usize;
                }
            }
        }
    }
    verdict(
        mismatches == 0 && n_models > 0,
        format!("{n_models} HWK models, {checks} checks, {mismatches} bit mismatches"),
    )
}

fn criterion_6(shared: &Shared) -> Verdict {
    let r = &shared.experiment.report;
    let hwk = hwk_name(&[Horizon::Finite(6.0 * HOUR), Horizon::Finite(DAY), Horizon::Finite(4.0 * DAY)]);
    let mape_at = |model: &str, h: Horizon| r.cell(model, h, "overall").and_then(|c| c.mape);
    let long = [DAY, 2.0 * DAY, 4.0 * DAY, 7.0 * DAY].map(Horizon::Finite).into_iter().chain([Horizon::Infinite]);
    let mut max_gap = 0.0f64;
    let mut a_ok = true;
    for h in long {
        match (mape_at(&hwk, h), mape_at(PB_NAME, h)) {
            (Some(a), Some(b)) => {
                max_gap = max_gap.max((a - b).abs());
                a_ok &= (a - b).abs() <= 0.05;
            }
            _ => a_ok = false,
        }
    }
    let untrained = [3.0 * HOUR, 12.0 * HOUR, 2.0 * DAY].map(Horizon::Finite);
    let mut diffs = Vec::new();
    for h in untrained {
        if let (Some(sp), Some(de)) = (mape_at(HF_SPARSE_NAME, h), mape_at(HF_DENSE_NAME, h)) {
            diffs.push(sp - de);
        }
    }
    let degradation = if diffs.len() == untrained.len() { diffs.iter().sum::<f64>() / diffs.len() as f64 } else { f64::NAN };
    let b_ok = degradation >= 0.03;
    let time_ok = shared.elapsed <= 1_800.0;
    verdict(
        a_ok && b_ok && time_ok,
        format!(
            "(a) max |HWK - PB| MAPE at >=1d {max_gap:.4}; (b) sparse-dense HF degradation {degradation:.4}; {:.0}s end to end",
            shared.elapsed
        ),
    )
}

fn criterion_7(shared: &Shared) -> Verdict {
    let start = Instant::now();
    let hwk = shared
        .experiment
        .models
        .iter()
        .find_map(|m| match m {
            TrainedModel::Hwk(n, model) if model.n_horizons() == 3 => Some((n.clone(), model)),
            _ => None,
        })
        .expect("HWK(6h,1d,4d) trained")
        .1;
    let rows = bench_prediction_cost(
        &[ModelKind::Hwk, ModelKind::Seismic, ModelKind::Rpp],
        Some(hwk),
        &SeismicConfig::default(),
        &RppFitConfig::default(),
        &BenchConfig { seed: 7, ..BenchConfig::default() },
    )
    .unwrap();
    let ratio = max_min_ratio(&rows, "HWK").unwrap_or(f64::NAN);
    let slope = loglog_slope(&rows, "SEISMIC").unwrap_or(f64::NAN);
    let rpp = mean_at(&rows, "RPP", 100_000).unwrap_or(f64::NAN);
    let hwk_t = mean_at(&rows, "HWK", 100_000).unwrap_or(f64::NAN);
    let speedup = rpp / hwk_t;
    let elapsed = start.elapsed().as_secs_f64();
    verdict(
        ratio <= 2.0 && slope >= 0.8 && speedup >= 100.0 && elapsed <= 900.0,
        format!("HWK max/min {ratio:.2}; SEISMIC slope {slope:.3}; RPP/HWK at 1e5 {speedup:.0}x; {elapsed:.0}s"),
    )
}

// ---------------------------------------------------------------- criterion 5

/// Returns feature `0` (count regressor) or `1` (growth-exponent regressor).
#[derive(Debug, Clone)]
struct OracleSlot(usize);

impl Regressor for OracleSlot {
    fn predict(&self, features: &[f64]) -> f64 {
        features[self.0]
    }
}

fn criterion_5() -> Verdict {
    let mut rng = rng_from_seed(505);
    let fc = FeatureConfig::new(HOUR);
    let schema = FeatureSchema::new(2, fc.clone()).unwrap();
    let mut worst = 0.0f64;
    let mut checks = 0;
    for item in 0..200 {
        let beta = (rng.random_range((1.0 / DAY).ln()..(1.0f64 / 600.0).ln())).exp();
        let rho1 = rng.random_range(0.1..0.9);
        let alpha = beta * (1.0 - rho1);
        let params = HawkesExpParams::new(beta, rho1, 2.0 * rho1 * rho1, alpha * rng.random_range(10.0..500.0)).unwrap();
        let marks = MarkSampler::new(MarkLaw::Exponential, rho1, 2.0 * rho1 * rho1).unwrap();
        let s = rng.random_range(0.05..3.0) / alpha;
        let run = run_exp(beta, &marks, params.lambda0(), 0.0, s, usize::MAX, false, &mut item_rng(5_005, item));
        let hist = cascade(run.events, vec![]);
        let lambda_s = intensity_at(&hist, &params, s).unwrap();
        let reference = Horizon::Finite((rng.random_range(0.1f64..5.0)) / alpha);
        let e_ref = expected_count_exp(lambda_s, alpha, reference).unwrap();
        if e_ref < 0.01 {
            continue;
        }
        let attrs = vec![(e_ref + 1.0).ln(), alpha.ln()];
        let observed = cascade(hist.events.clone(), attrs);
        let x = extract_features(&observed, s, &fc).unwrap();
        let config = ModelConfig {
            horizons: vec![reference],
            aggregation: Aggregation::Single,
            log_offset: 1.0,
            ..ModelConfig::default()
        };
        let model = ForecastModel::from_parts(schema.clone(), &config, vec![OracleSlot(0)], OracleSlot(1)).unwrap();
        let n_s = hist.count_before(s) as f64;
        let grid = [0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0, 100.0]
            .map(|k| Horizon::Finite(k / alpha))
            .into_iter()
            .chain([reference, Horizon::Infinite]);
        for h in grid {
            let want = n_s + expected_count_exp(lambda_s, alpha, h).unwrap();
            let got = model.predict_single(&x, n_s, h).unwrap();
            worst = worst.max((got - want).abs() / want.abs().max(f64::MIN_POSITIVE));
            checks += 1;
        }
    }
    verdict(worst <= 1e-9, format!("{checks} predictions, worst relative error {worst:.2e}"))
}

// ---------------------------------------------------------------- criterion 8

fn criterion_8() -> Verdict {
    const ITEMS: usize = 1_000;
    let (c, eps) = (2.0, 0.2);
    let outcomes: Vec<Option<bool>> = (0..ITEMS)
        .into_par_iter()
        .map(|i| {
            let mut g = item_rng(808, i);
            let beta = (g.random_range((1.0 / (2.0 * DAY)).ln()..(1.0 / (2.0 * HOUR)).ln())).exp();
            let rho1 = g.random_range(0.2..0.8);
            let alpha = beta * (1.0 - rho1);
            let size = (g.random_range(10.0f64.ln()..3_000.0f64.ln())).exp();
            let params = HawkesExpParams::new(beta, rho1, 2.0 * rho1 * rho1, alpha * size).unwrap();
            let marks = MarkSampler::new(MarkLaw::Exponential, rho1, 2.0 * rho1 * rho1).unwrap();
            let s = g.random_range(0.05..3.0) / alpha;
            let run = run_exp(beta, &marks, params.lambda0(), 0.0, f64::INFINITY, usize::MAX, false, &mut g);
            let full = cascade(run.events, vec![]);
            let n_s = full.count_before(s) as f64;
            if n_s < 1.0 {
                return None;
            }
            let lambda_s = intensity_at(&full, &params, s).unwrap();
            let d = relative_growth_decision(lambda_s, n_s, alpha, params.sigma_sq(), c, eps, GrowthRule::Confident).unwrap();
            (d == GrowthDecision::Exceeds).then(|| full.len() as f64 > c * n_s)
        })
        .collect();
    let fired: Vec<bool> = outcomes.iter().flatten().copied().collect();
    let rate = fired.iter().filter(|&&b| b).count() as f64 / fired.len().max(1) as f64;
    verdict(!fired.is_empty() && rate >= 0.8, format!("rule fired on {} of {ITEMS} items, success rate {rate:.3}", fired.len()))
}

// ---------------------------------------------------------------- criterion 9

fn brute_tau(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len();
    let (mut conc, mut disc, mut tx, mut ty) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            let a = (x[i] - x[j]).signum() * if x[i] == x[j] { 0.0 } else { 1.0 };
            let b = (y[i] - y[j]).signum() * if y[i] == y[j] { 0.0 } else { 1.0 };
            if a == 0.0 {
                tx += 1;
            }
            if b == 0.0 {
                ty += 1;
            }
            if a * b > 0.0 {
                conc += 1;
            } else if a * b < 0.0 {
                disc += 1;
            }
        }
    }
    let n0 = (n * n.saturating_sub(1) / 2) as i64;
    let denom = (((n0 - tx) * (n0 - ty)) as f64).sqrt();
    (denom > 0.0).then(|| (conc - disc) as f64 / denom)
}

fn brute_mape(p: &[f64], t: &[f64]) -> Option<f64> {
    if t.iter().any(|t| *t < 0.0) {
        return None;
    }
    let mut errs: Vec<f64> = p.iter().zip(t).filter(|(_, t)| **t != 0.0).map(|(p, t)| ((p - t) / t).abs()).collect();
    if errs.is_empty() {
        return None;
    }
    errs.sort_by(f64::total_cmp);
    let k = errs.len();
    Some(if k % 2 == 1 { errs[k / 2] } else { 0.5 * (errs[k / 2 - 1] + errs[k / 2]) })
}

fn brute_rmse(p: &[f64], t: &[f64]) -> f64 {
    (p.iter().zip(t).map(|(p, t)| (p - t).powi(2)).sum::<f64>() / p.len() as f64).sqrt()
}

struct MetricCheck {
    cases: usize,
    failures: usize,
}

impl MetricCheck {
    fn run(&mut self, x: &[f64], y: &[f64]) {
        self.cases += 1;
        let tau_ok = match (kendall_tau(x, y).ok(), brute_tau(x, y)) {
            (Some(a), Some(b)) => a == b || (a - b).abs() <= 1e-12,
            (None, None) => true,
            _ => false,
        };
        let counts_ok = pair_counts(x, y).is_ok();
        let mape_ok = match (mape(x, y).ok().filter(|m| m.n_used > 0).map(|m| m.value), brute_mape(x, y)) {
            (Some(a), Some(b)) => (a - b).abs() <= 1e-12 * b.abs().max(1.0),
            (None, None) => true,
            _ => false,
        };
        let r = rmse(x, y).unwrap();
        let rmse_ok = (r - brute_rmse(x, y)).abs() <= 1e-12 * r.max(1.0);
        if !(tau_ok && counts_ok && mape_ok && rmse_ok) {
            self.failures += 1;
        }
    }
}

fn permutations(k: usize, a: &mut Vec<f64>, out: &mut dyn FnMut(&[f64])) {
    // Heap's algorithm
    if k <= 1 {
        out(a);
        return;
    }
    for i in 0..k - 1 {
        permutations(k - 1, a, out);
        if k.is_multiple_of(2) {
            a.swap(i, k - 1);
        } else {
            a.swap(0, k - 1);
        }
    }
    permutations(k - 1, a, out);
}

fn criterion_9() -> Verdict {
    let mut chk = MetricCheck { cases: 0, failures: 0 };
    for n in 1..=10usize {
        let x: Vec<f64> = (1..=n).map(|i| i as f64).collect();
        let mut y = x.clone();
        permutations(n, &mut y, &mut |p| chk.run(&x, p));
    }
    for n in 1..=6u32 {
        let total = 3usize.pow(n);
        for a in 0..total {
            for b in (0..total).step_by(if n >= 5 { 7 } else { 1 }) {
                let digits = |mut v: usize| {
                    (0..n)
                        .map(|_| {
                            let d = v % 3;
                            v /= 3;
                            d as f64
                        })
                        .collect::<Vec<f64>>()
                };
                chk.run(&digits(a), &digits(b));
            }
        }
    }
    let exhaustive = chk.cases;
    let mut rng = rng_from_seed(909);
    for _ in 0..1_000 {
        let n = rng.random_range(1..300usize);
        let ties = rng.random_bool(0.5);
        let draw = |r: &mut hawkes_horizon::sim::SimRng, lo: f64| {
            if ties {
                r.random_range(0..6) as f64
            } else {
                r.random_range(lo..1_000.0)
            }
        };
        // predictions may be negative, truths are counts
        let x: Vec<f64> = (0..n).map(|_| draw(&mut rng, -100.0)).collect();
        let y: Vec<f64> = (0..n).map(|_| draw(&mut rng, 0.0)).collect();
        chk.run(&x, &y);
    }
    verdict(
        chk.failures == 0,
        format!("{exhaustive} exhaustive + {} random cases, {} mismatches", chk.cases - exhaustive, chk.failures),
    )
}

// ---------------------------------------------------------------- driver

fn report(id: u32, v: Verdict, failures: &mut Vec<u32>) {
    println!("criterion {id}: {} {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
    if !v.pass {
        failures.push(id);
    }
}

fn main() {
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let want = |id: u32| selected.is_empty() || selected.contains(&id);
    let mut failures = Vec::new();
    let mut shared: Option<Shared> = None;
    for id in 1..=9u32 {
        if !want(id) {
            continue;
        }
        if matches!(id, 4 | 6 | 7) && shared.is_none() {
            shared = Some(shared_experiment());
        }
        let start = Instant::now();
        let mut v = match id {
            1 => criterion_1(),
            2 => criterion_2(),
            3 => criterion_3(),
            4 => criterion_4(shared.as_ref().unwrap()),
            5 => criterion_5(),
            6 => criterion_6(shared.as_ref().unwrap()),
            7 => criterion_7(shared.as_ref().unwrap()),
            8 => criterion_8(),
            _ => criterion_9(),
        };
        if id != 6 {
            v.detail.push_str(&format!(" [{:.1}s]", start.elapsed().as_secs_f64()));
        }
        report(id, v, &mut failures);
    }
    let unexpected: Vec<u32> = failures.iter().copied().filter(|id| !KNOWN_FAILURES.contains(id)).collect();
    println!(
        "acceptance: {} failed ({} known), {} unexpected",
        failures.len(),
        failures.len() - unexpected.len(),
        unexpected.len()
    );
    if !unexpected.is_empty() {
        std::process::exit(1);
    }
}
