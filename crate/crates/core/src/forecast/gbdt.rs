//! Histogram-based gradient-boosted regression trees with squared-error loss.

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::rng_from_seed;

/// A fitted point predictor.
pub trait Regressor {
    fn predict(&self, features: &[f64]) -> f64;
}

/// Something that fits a [`Regressor`] on row-major data.
pub trait Learner {
    type Model: Regressor;
    fn fit(&self, rows: &[Vec<f64>], targets: &[f64]) -> Result<Self::Model>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GbdtParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    pub min_samples_leaf: usize,
    pub max_bins: usize,
    /// Fraction of rows sampled without replacement per tree.
    pub subsample: f64,
    pub seed: u64,
}

impl Default for GbdtParams {
    fn default() -> Self {
        GbdtParams {
            n_trees: 200,
            max_depth: 6,
            learning_rate: 0.1,
            min_samples_leaf: 20,
            max_bins: 255,
            subsample: 1.0,
            seed: 0,
        }
    }
}

impl GbdtParams {
    pub fn validate(&self) -> Result<()> {
        if self.max_depth == 0 || self.max_depth > 16 {
            return Err(Error::param(format!("max_depth must lie in 1..=16, got {}", self.max_depth)));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return Err(Error::param(format!("learning_rate must lie in (0, 1], got {}", self.learning_rate)));
        }
        if self.min_samples_leaf == 0 {
            return Err(Error::param("min_samples_leaf must be >= 1"));
        }
        if !(2..=256).contains(&self.max_bins) {
            return Err(Error::param(format!("max_bins must lie in 2..=256, got {}", self.max_bins)));
        }
        if !(self.subsample > 0.0 && self.subsample <= 1.0) {
            return Err(Error::param(format!("subsample must lie in (0, 1], got {}", self.subsample)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Node {
    Leaf { value: f64 },
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    fn predict(&self, x: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { value } => return value,
                Node::Split { feature, threshold, left, right } => {
                    i = if x[feature] <= threshold { left } else { right };
                }
            }
        }
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }
}

/// Additive tree ensemble: `base + Σ tree(x)`, learning rate folded into leaves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeEnsemble {
    pub n_features: usize,
    pub base: f64,
    pub learning_rate: f64,
    pub trees: Vec<Tree>,
    /// Set when the training target was constant; the model predicts `base`.
    pub constant_target: bool,
}

impl TreeEnsemble {
    pub fn constant(n_features: usize, value: f64) -> Self {
        TreeEnsemble { n_features, base: value, learning_rate: 0.0, trees: Vec::new(), constant_target: true }
    }
}

impl Regressor for TreeEnsemble {
    fn predict(&self, features: &[f64]) -> f64 {
        debug_assert_eq!(features.len(), self.n_features);
        self.base + self.trees.iter().map(|t| t.predict(features)).sum::<f64>()
    }
}

impl Learner for GbdtParams {
    type Model = TreeEnsemble;

    fn fit(&self, rows: &[Vec<f64>], targets: &[f64]) -> Result<TreeEnsemble> {
        fit_gbdt(rows, targets, self)
    }
}

/// Per-feature candidate thresholds; bin `b` holds values in `(thr[b-1], thr[b]]`.
struct Binned {
    thresholds: Vec<Vec<f64>>,
    /// Column-major bin indices.
    bins: Vec<Vec<u8>>,
}

fn bin_features(rows: &[Vec<f64>], n_features: usize, max_bins: usize) -> Binned {
    let n = rows.len();
    let mut thresholds = Vec::with_capacity(n_features);
    let mut bins = Vec::with_capacity(n_features);
    for f in 0..n_features {
        let mut col: Vec<f64> = rows.iter().map(|r| r[f]).collect();
        col.sort_by(f64::total_cmp);
        col.dedup();
        let cuts: Vec<f64> = if col.len() <= max_bins {
            col.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
        } else {
            let mut cuts: Vec<f64> = (1..max_bins)
                .map(|k| {
                    let i = k * col.len() / max_bins;
                    0.5 * (col[i - 1] + col[i])
                })
                .collect();
            cuts.dedup();
            cuts
        };
        let column = (0..n).map(|i| cuts.partition_point(|&c| c < rows[i][f]) as u8).collect();
        thresholds.push(cuts);
        bins.push(column);
    }
    Binned { thresholds, bins }
}

struct TreeBuilder<'a> {
    binned: &'a Binned,
    residuals: &'a [f64],
    params: &'a GbdtParams,
    nodes: Vec<Node>,
    hist_sum: Vec<f64>,
    hist_cnt: Vec<u32>,
}

impl TreeBuilder<'_> {
    fn leaf(&mut self, idx: &[usize]) -> usize {
        let sum: f64 = idx.iter().map(|&i| self.residuals[i]).sum();
        let value = self.params.learning_rate * sum / idx.len() as f64;
        self.nodes.push(Node::Leaf { value });
        self.nodes.len() - 1
    }

    /// Best `(gain, feature, bin)` split of `idx`.
    fn best_split(&mut self, idx: &[usize]) -> Option<(f64, usize, usize)> {
        let min_leaf = self.params.min_samples_leaf;
        let total: f64 = idx.iter().map(|&i| self.residuals[i]).sum();
        let n = idx.len();
        let parent = total * total / n as f64;
        let mut best: Option<(f64, usize, usize)> = None;
        for (f, cuts) in self.binned.thresholds.iter().enumerate() {
            if cuts.is_empty() {
                continue;
            }
            let nb = cuts.len() + 1;
            self.hist_sum[..nb].fill(0.0);
            self.hist_cnt[..nb].fill(0);
            let col = &self.binned.bins[f];
            for &i in idx {
                let b = col[i] as usize;
                self.hist_sum[b] += self.residuals[i];
                self.hist_cnt[b] += 1;
            }
            let (mut sl, mut nl) = (0.0, 0usize);
            for b in 0..nb - 1 {
                sl += self.hist_sum[b];
                nl += self.hist_cnt[b] as usize;
                let nr = n - nl;
                if nl < min_leaf {
                    continue;
                }
                if nr < min_leaf {
                    break;
                }
                let sr = total - sl;
                let gain = sl * sl / nl as f64 + sr * sr / nr as f64 - parent;
                if gain > best.map_or(1e-12 * (1.0 + parent.abs()), |b| b.0) {
                    best = Some((gain, f, b));
                }
            }
        }
        best
    }

    fn grow(&mut self, idx: &mut [usize], depth: usize) -> usize {
        if depth >= self.params.max_depth || idx.len() < 2 * self.params.min_samples_leaf {
            return self.leaf(idx);
        }
        let Some((_, f, b)) = self.best_split(idx) else {
            return self.leaf(idx);
        };
        let col = &self.binned.bins[f];
        let mut split = 0;
        for k in 0..idx.len() {
            if col[idx[k]] as usize <= b {
                idx.swap(k, split);
                split += 1;
            }
        }
        let me = self.nodes.len();
        self.nodes.push(Node::Leaf { value: 0.0 });
        let (l, r) = idx.split_at_mut(split);
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        self.nodes[me] = Node::Split { feature: f, threshold: self.binned.thresholds[f][b], left, right };
        me
    }
}

pub fn fit_gbdt(rows: &[Vec<f64>], targets: &[f64], params: &GbdtParams) -> Result<TreeEnsemble> {
    params.validate()?;
    if rows.is_empty() {
        return Err(Error::InsufficientData("cannot fit a regressor on an empty training set".into()));
    }
    if rows.len() != targets.len() {
        return Err(Error::param(format!("{} rows but {} targets", rows.len(), targets.len())));
    }
    let n_features = rows[0].len();
    if let Some(r) = rows.iter().position(|r| r.len() != n_features) {
        return Err(Error::param(format!("row {r} has {} features, expected {n_features}", rows[r].len())));
    }
    if rows.iter().flatten().chain(targets).any(|x| !x.is_finite()) {
        return Err(Error::domain("training data contains non-finite values"));
    }
    let n = rows.len();
    let base = targets.iter().sum::<f64>() / n as f64;
    let (lo, hi) = targets.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &y| (a.min(y), b.max(y)));
    if hi - lo <= 1e-12 * (1.0 + base.abs()) {
        return Ok(TreeEnsemble::constant(n_features, base));
    }

    let binned = bin_features(rows, n_features, params.max_bins);
    let mut pred = vec![base; n];
    let mut residuals = vec![0.0; n];
    let mut rng = rng_from_seed(params.seed);
    let n_sub = ((params.subsample * n as f64).round() as usize).clamp(1, n);
    let mut trees = Vec::with_capacity(params.n_trees);
    let mut hist_sum = vec![0.0; params.max_bins];
    let mut hist_cnt = vec![0u32; params.max_bins];
    for _ in 0..params.n_trees {
        for i in 0..n {
            residuals[i] = targets[i] - pred[i];
        }
        let mut idx: Vec<usize> = if n_sub < n {
            let mut v = sample(&mut rng, n, n_sub).into_vec();
            v.sort_unstable();
            v
        } else {
            (0..n).collect()
        };
        let mut builder = TreeBuilder {
            binned: &binned,
            residuals: &residuals,
            params,
            nodes: Vec::new(),
            hist_sum: std::mem::take(&mut hist_sum),
            hist_cnt: std::mem::take(&mut hist_cnt),
        };
        builder.grow(&mut idx, 0);
        hist_sum = builder.hist_sum;
        hist_cnt = builder.hist_cnt;
        let tree = Tree { nodes: builder.nodes };
        for (p, row) in pred.iter_mut().zip(rows) {
            *p += tree.predict(row);
        }
        trees.push(tree);
    }
    Ok(TreeEnsemble { n_features, base, learning_rate: params.learning_rate, trees, constant_target: false })
}
