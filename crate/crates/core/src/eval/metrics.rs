use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_lengths(pred: &[f64], truth: &[f64]) -> Result<()> {
    if pred.len() != truth.len() {
        return Err(Error::param(format!("{} predictions but {} truths", pred.len(), truth.len())));
    }
    if pred.iter().chain(truth).any(|x| !x.is_finite()) {
        return Err(Error::domain("metric inputs must be finite"));
    }
    Ok(())
}

/// Median of a nonempty slice (mean of the two middle values for even length).
pub fn median(values: &mut [f64]) -> f64 {
    assert!(!values.is_empty(), "median of an empty slice");
    let n = values.len();
    let (_, hi, _) = values.select_nth_unstable_by(n / 2, f64::total_cmp);
    let hi = *hi;
    if n % 2 == 1 {
        return hi;
    }
    let lo = values[..n / 2].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    0.5 * (lo + hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mape {
    pub value: f64,
    pub n_used: usize,
    /// Examples with zero truth, which are left out.
    pub n_zero_truth: usize,
}

/// Median absolute percentage error over examples with positive truth.
pub fn mape(pred: &[f64], truth: &[f64]) -> Result<Mape> {
    check_lengths(pred, truth)?;
    if truth.iter().any(|t| *t < 0.0) {
        return Err(Error::domain("truths must be nonnegative"));
    }
    let mut errs: Vec<f64> = pred.iter().zip(truth).filter(|(_, t)| **t > 0.0).map(|(p, t)| (p - t).abs() / t).collect();
    let n_zero_truth = pred.len() - errs.len();
    if errs.is_empty() {
        return Err(Error::InsufficientData("no examples with positive truth".into()));
    }
    Ok(Mape { value: median(&mut errs), n_used: errs.len(), n_zero_truth })
}

pub fn rmse(pred: &[f64], truth: &[f64]) -> Result<f64> {
    check_lengths(pred, truth)?;
    if pred.is_empty() {
        return Err(Error::InsufficientData("rmse needs at least one example".into()));
    }
    let sse: f64 = pred.iter().zip(truth).map(|(p, t)| (p - t) * (p - t)).sum();
    Ok((sse / pred.len() as f64).sqrt())
}

/// Pair counts behind Kendall's tau-b.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairCounts {
    pub total: u64,
    /// Pairs tied in the first variable.
    pub tied_x: u64,
    /// Pairs tied in the second variable.
    pub tied_y: u64,
    /// Pairs tied in both.
    pub tied_xy: u64,
    pub discordant: u64,
}

impl PairCounts {
    pub fn concordant(&self) -> u64 {
        self.total + self.tied_xy - self.tied_x - self.tied_y - self.discordant
    }

    /// `(C - D) / sqrt((n0 - n1)(n0 - n2))`.
    pub fn tau_b(&self) -> Result<f64> {
        let a = self.total - self.tied_x;
        let b = self.total - self.tied_y;
        if a == 0 || b == 0 {
            return Err(Error::domain("rank correlation undefined: one variable is constant"));
        }
        let num = self.concordant() as f64 - self.discordant as f64;
        Ok(num / ((a as f64) * (b as f64)).sqrt())
    }
}

fn tie_pairs<T: PartialEq>(sorted: impl Iterator<Item = T>) -> u64 {
    let mut total = 0u64;
    let mut run = 0u64;
    let mut prev: Option<T> = None;
    for v in sorted {
        if prev.as_ref() == Some(&v) {
            run += 1;
        } else {
            total += run * (run.saturating_sub(1)) / 2;
            run = 1;
        }
        prev = Some(v);
    }
    total + run * run.saturating_sub(1) / 2
}

/// Merge sort by `y` counting inversions.
fn sort_count_swaps(ys: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = ys.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = {
        let (l, r) = ys.split_at_mut(mid);
        let (bl, br) = buf.split_at_mut(mid);
        sort_count_swaps(l, bl) + sort_count_swaps(r, br)
    };
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if ys[j] < ys[i] {
            buf[k] = ys[j];
            swaps += (mid - i) as u64;
            j += 1;
        } else {
            buf[k] = ys[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&ys[i..mid]);
    k += mid - i;
    buf[k..k + n - j].copy_from_slice(&ys[j..n]);
    ys.copy_from_slice(&buf[..n]);
    swaps
}

/// Pair counts in O(n log n) (Knight's algorithm).
pub fn pair_counts(x: &[f64], y: &[f64]) -> Result<PairCounts> {
    check_lengths(x, y)?;
    let n = x.len() as u64;
    let mut pairs: Vec<(f64, f64)> = x.iter().copied().zip(y.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let tied_x = tie_pairs(pairs.iter().map(|p| p.0));
    let tied_xy = tie_pairs(pairs.iter().copied());
    let mut ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let mut buf = vec![0.0; ys.len()];
    let discordant = sort_count_swaps(&mut ys, &mut buf);
    let tied_y = tie_pairs(ys.iter().copied());
    Ok(PairCounts { total: n * n.saturating_sub(1) / 2, tied_x, tied_y, tied_xy, discordant })
}

/// Kendall's tau-b rank correlation.
pub fn kendall_tau(pred: &[f64], truth: &[f64]) -> Result<f64> {
    if pred.len() < 2 {
        return Err(Error::InsufficientData("rank correlation needs at least 2 examples".into()));
    }
    pair_counts(pred, truth)?.tau_b()
}
