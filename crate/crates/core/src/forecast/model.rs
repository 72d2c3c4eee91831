use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::AlphaEstimator;
use crate::forecast::features::{FeatureConfig, FeatureSchema};
use crate::forecast::gbdt::{GbdtParams, Learner, Regressor, TreeEnsemble};
use crate::forecast::training::{build_training_set, SamplingPolicy, TrainingSet};
use crate::hawkes::one_minus_exp_neg;
use crate::time::{Horizon, DAY, HOUR};

pub const MODEL_FORMAT: &str = "hawkes-horizon-model";
pub const MODEL_FORMAT_VERSION: u32 = 1;

/// How per-reference-horizon predictions are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    Single,
    Arithmetic,
    #[default]
    Geometric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub horizons: Vec<Horizon>,
    pub aggregation: Aggregation,
    pub log_offset: f64,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub alpha_label: AlphaEstimator,
    pub sampling: SamplingPolicy,
    pub gbdt: GbdtParams,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            horizons: vec![Horizon::Finite(6.0 * HOUR), Horizon::Finite(DAY), Horizon::Finite(4.0 * DAY)],
            aggregation: Aggregation::Geometric,
            log_offset: 1.0,
            alpha_min: 1e-7,
            alpha_max: 1e2,
            alpha_label: AlphaEstimator::default(),
            sampling: SamplingPolicy::default(),
            gbdt: GbdtParams::default(),
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        check_horizons(&self.horizons)?;
        if !(self.alpha_min > 0.0 && self.alpha_max >= self.alpha_min && self.alpha_max.is_finite()) {
            return Err(Error::param(format!(
                "alpha bounds must satisfy 0 < min <= max < inf, got [{}, {}]",
                self.alpha_min, self.alpha_max
            )));
        }
        if !(self.log_offset >= 0.0 && self.log_offset.is_finite()) {
            return Err(Error::param(format!("log offset must be finite and >= 0, got {}", self.log_offset)));
        }
        self.sampling.validate()?;
        self.gbdt.validate()
    }
}

fn check_horizons(horizons: &[Horizon]) -> Result<()> {
    if horizons.is_empty() {
        return Err(Error::param("at least one reference horizon is required"));
    }
    if horizons.iter().any(|h| h.is_infinite()) {
        return Err(Error::param("reference horizons must be finite"));
    }
    if horizons.windows(2).any(|w| w[0].seconds() >= w[1].seconds()) {
        return Err(Error::param("reference horizons must be strictly increasing"));
    }
    Ok(())
}

/// `1 - exp(-alpha * delta)`, equal to 1 at the infinite horizon.
#[inline]
fn saturation(alpha: f64, delta: Horizon) -> f64 {
    match delta {
        Horizon::Infinite => 1.0,
        Horizon::Finite(d) => one_minus_exp_neg(alpha * d),
    }
}

/// Two learned point predictors extrapolated to any horizon through the
/// exponential-kernel closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastModel<R = TreeEnsemble> {
    pub format: String,
    pub format_version: u32,
    pub schema: FeatureSchema,
    pub horizons: Vec<Horizon>,
    /// Predict `ln(increment + log_offset)` at each reference horizon.
    pub count_regressors: Vec<R>,
    /// Predicts `ln alpha`.
    pub alpha_regressor: R,
    pub aggregation: Aggregation,
    pub log_offset: f64,
    pub alpha_min: f64,
    pub alpha_max: f64,
}

impl ForecastModel<TreeEnsemble> {
    /// Builds the training set from `cascades` and fits all regressors.
    pub fn train(cascades: &[crate::Cascade], features: &FeatureConfig, config: &ModelConfig) -> Result<(Self, TrainingSet)> {
        config.validate()?;
        let set = build_training_set(
            cascades,
            &config.horizons,
            features,
            &config.sampling,
            &config.alpha_label,
            config.log_offset,
        )?;
        let model = ForecastModel::fit(&set, config, &config.gbdt)?;
        Ok((model, set))
    }
}

impl<R: Regressor + Send> ForecastModel<R> {
    /// Fits the count and growth-exponent regressors independently.
    pub fn fit<L>(set: &TrainingSet, config: &ModelConfig, learner: &L) -> Result<Self>
    where
        L: Learner<Model = R> + Sync,
    {
        config.validate()?;
        if config.horizons != set.horizons {
            return Err(Error::param("training set horizons differ from the model configuration"));
        }
        if set.examples.is_empty() {
            return Err(Error::InsufficientData("training set has no examples".into()));
        }
        let rows = set.rows();
        let m = set.horizons.len();
        let fitted: Vec<Result<R>> = (0..=m)
            .into_par_iter()
            .map(|j| {
                let y: Vec<f64> = if j < m {
                    set.examples.iter().map(|e| e.count_labels[j]).collect()
                } else {
                    set.examples.iter().map(|e| e.alpha_label).collect()
                };
                learner.fit(&rows, &y)
            })
            .collect();
        let mut fitted = fitted.into_iter().collect::<Result<Vec<R>>>()?;
        let alpha_regressor = fitted.pop().expect("m + 1 regressors");
        ForecastModel::from_parts(set.schema.clone(), config, fitted, alpha_regressor)
    }
}

impl<R: Regressor> ForecastModel<R> {
    /// Assembles a model from already-fitted regressors.
    pub fn from_parts(schema: FeatureSchema, config: &ModelConfig, count_regressors: Vec<R>, alpha_regressor: R) -> Result<Self> {
        config.validate()?;
        if count_regressors.len() != config.horizons.len() {
            return Err(Error::param(format!(
                "{} count regressors for {} horizons",
                count_regressors.len(),
                config.horizons.len()
            )));
        }
        Ok(ForecastModel {
            format: MODEL_FORMAT.into(),
            format_version: MODEL_FORMAT_VERSION,
            schema,
            horizons: config.horizons.clone(),
            count_regressors,
            alpha_regressor,
            aggregation: config.aggregation,
            log_offset: config.log_offset,
            alpha_min: config.alpha_min,
            alpha_max: config.alpha_max,
        })
    }

    pub fn n_horizons(&self) -> usize {
        self.horizons.len()
    }

    /// Raw output of count regressor `i`.
    pub fn point_output(&self, features: &[f64], i: usize) -> f64 {
        self.count_regressors[i].predict(features)
    }

    /// Predicted increment over reference horizon `i`: `max(0, exp(Y) - offset)`.
    pub fn point_increment(&self, features: &[f64], i: usize) -> f64 {
        (self.point_output(features, i).exp() - self.log_offset).max(0.0)
    }

    /// Predicted growth exponent, clamped to the configured bounds.
    pub fn alpha(&self, features: &[f64]) -> Result<f64> {
        let a = self.alpha_regressor.predict(features).exp();
        let a = if a.is_nan() { self.alpha_min } else { a.clamp(self.alpha_min, self.alpha_max) };
        if !(a > 0.0) {
            return Err(Error::domain("predicted growth exponent is not positive"));
        }
        Ok(a)
    }

    fn check(&self, features: &[f64], n_s: f64) -> Result<()> {
        self.schema.check(features)?;
        if !(n_s >= 0.0 && n_s.is_finite()) {
            return Err(Error::param(format!("current count must be finite and >= 0, got {n_s}")));
        }
        Ok(())
    }

    /// Extrapolation from reference horizon `i` alone:
    /// `N_s + inc_i * q(delta) / q(delta*_i)` with `q(x) = 1 - exp(-alpha x)`.
    pub fn predict_from_reference(&self, features: &[f64], n_s: f64, delta: Horizon, i: usize) -> Result<f64> {
        self.check(features, n_s)?;
        if i >= self.horizons.len() {
            return Err(Error::param(format!("reference index {i} out of range")));
        }
        let alpha = self.alpha(features)?;
        let inc = self.point_increment(features, i);
        Ok(n_s + inc * (saturation(alpha, delta) / saturation(alpha, self.horizons[i])))
    }

    /// Single-reference prediction; requires a model with one reference horizon.
    pub fn predict_single(&self, features: &[f64], n_s: f64, delta: Horizon) -> Result<f64> {
        if self.horizons.len() != 1 {
            return Err(Error::param(format!(
                "single-horizon prediction needs one reference horizon, model has {}",
                self.horizons.len()
            )));
        }
        self.predict_from_reference(features, n_s, delta, 0)
    }

    /// Arithmetic mean of the implied asymptotes `inc_i / q(delta*_i)`, scaled by `q(delta)`.
    pub fn predict_arithmetic(&self, features: &[f64], n_s: f64, delta: Horizon) -> Result<f64> {
        if self.horizons.len() == 1 {
            return self.predict_from_reference(features, n_s, delta, 0);
        }
        self.check(features, n_s)?;
        let alpha = self.alpha(features)?;
        let m = self.horizons.len() as f64;
        let asymptote = (0..self.horizons.len())
            .map(|i| self.point_increment(features, i) / saturation(alpha, self.horizons[i]))
            .sum::<f64>()
            / m;
        Ok(n_s + asymptote * saturation(alpha, delta))
    }

    /// Geometric mean of the implied asymptotes, scaled by `q(delta)`.
    pub fn predict_geometric(&self, features: &[f64], n_s: f64, delta: Horizon) -> Result<f64> {
        if self.horizons.len() == 1 {
            return self.predict_from_reference(features, n_s, delta, 0);
        }
        self.check(features, n_s)?;
        let alpha = self.alpha(features)?;
        let m = self.horizons.len() as f64;
        let log_asymptote = (0..self.horizons.len())
            .map(|i| self.point_increment(features, i).ln() - saturation(alpha, self.horizons[i]).ln())
            .sum::<f64>()
            / m;
        Ok(n_s + log_asymptote.exp() * saturation(alpha, delta))
    }

    /// Prediction using the model's configured aggregation.
    pub fn predict(&self, features: &[f64], n_s: f64, delta: Horizon) -> Result<f64> {
        match self.aggregation {
            Aggregation::Single => self.predict_from_reference(features, n_s, delta, 0),
            Aggregation::Arithmetic => self.predict_arithmetic(features, n_s, delta),
            Aggregation::Geometric => self.predict_geometric(features, n_s, delta),
        }
    }
}

impl<R> ForecastModel<R>
where
    R: Serialize + for<'de> Deserialize<'de>,
{
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Header {
            format: String,
            format_version: u32,
        }
        let header: Header = serde_json::from_str(text)?;
        if header.format != MODEL_FORMAT {
            return Err(Error::Serialization(format!("not a model file (format '{}')", header.format)));
        }
        if header.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::SchemaVersion { found: header.format_version, expected: MODEL_FORMAT_VERSION });
        }
        Ok(serde_json::from_str(text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Reads `ln(increment + 1)` per horizon and `ln alpha` from fixed slots.
    #[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
    struct Slot(usize);

    impl Regressor for Slot {
        fn predict(&self, x: &[f64]) -> f64 {
            x[self.0]
        }
    }

    fn model(horizons: &[f64], agg: Aggregation) -> ForecastModel<Slot> {
        let m = horizons.len();
        let cfg = FeatureConfig::new(60.0);
        let schema = FeatureSchema::new(m + 1, cfg.clone()).unwrap();
        let config = ModelConfig {
            horizons: horizons.iter().map(|&h| Horizon::Finite(h)).collect(),
            aggregation: agg,
            ..Default::default()
        };
        ForecastModel::from_parts(schema, &config, (0..m).map(Slot).collect(), Slot(m)).unwrap()
    }

    fn features(model: &ForecastModel<Slot>, incs: &[f64], alpha: f64) -> Vec<f64> {
        let mut x = vec![0.0; model.schema.width()];
        for (i, v) in incs.iter().enumerate() {
            x[i] = (v + 1.0).ln();
        }
        x[incs.len()] = alpha.ln();
        x
    }

    #[test]
    fn passthrough_at_reference() {
        let m = model(&[3600.0], Aggregation::Single);
        let x = features(&m, &[41.0], 1e-4);
        let expect = 5.0 + (m.point_output(&x, 0).exp() - 1.0);
        assert_eq!(m.predict_single(&x, 5.0, Horizon::Finite(3600.0)).unwrap(), expect);
    }

    #[test]
    fn doubling_multiplier() {
        let m = model(&[100.0], Aggregation::Single);
        let x = features(&m, &[10.0], std::f64::consts::LN_2 / 100.0);
        let inc = m.point_increment(&x, 0);
        let p = m.predict_single(&x, 0.0, Horizon::Finite(200.0)).unwrap();
        assert!((p / inc - 1.5).abs() < 1e-12);
    }

    #[test]
    fn saturated_infinite_horizon_is_passthrough() {
        let m = model(&[100.0], Aggregation::Single);
        let x = features(&m, &[10.0], 1.0);
        let inc = m.point_increment(&x, 0);
        assert_eq!(m.predict_single(&x, 2.0, Horizon::Infinite).unwrap(), 2.0 + inc);
    }

    #[test]
    fn aggregations_of_two() {
        let alpha = 1e-3;
        let h = [500.0, 3000.0];
        let (a, b) = (40.0, 90.0);
        let q = |d: f64| one_minus_exp_neg(alpha * d);
        let incs = [a * q(h[0]), b * q(h[1])];
        let ar = model(&h, Aggregation::Arithmetic);
        let x = features(&ar, &incs, alpha);
        let pa = ar.predict(&x, 0.0, Horizon::Infinite).unwrap();
        let pg = model(&h, Aggregation::Geometric).predict(&x, 0.0, Horizon::Infinite).unwrap();
        assert!((pa - (a + b) / 2.0).abs() < 1e-9);
        assert!((pg - (a * b).sqrt()).abs() < 1e-9);
        assert!(pg <= pa);
    }

    #[test]
    fn equal_asymptotes_agree() {
        let alpha = 2e-3;
        let h = [500.0, 3000.0];
        let q = |d: f64| one_minus_exp_neg(alpha * d);
        let incs = [70.0 * q(h[0]), 70.0 * q(h[1])];
        let ar = model(&h, Aggregation::Arithmetic);
        let x = features(&ar, &incs, alpha);
        for d in [10.0, 1000.0, 1e6] {
            let pa = ar.predict(&x, 3.0, Horizon::Finite(d)).unwrap();
            let pg = model(&h, Aggregation::Geometric).predict(&x, 3.0, Horizon::Finite(d)).unwrap();
            assert!((pa - pg).abs() <= 1e-9 * pa);
        }
    }

    #[test]
    fn single_requires_one_horizon() {
        let m = model(&[1.0, 2.0], Aggregation::Single);
        let x = features(&m, &[1.0, 2.0], 1.0);
        assert!(m.predict_single(&x, 0.0, Horizon::Infinite).is_err());
        assert!(m.predict(&x, 0.0, Horizon::Infinite).is_ok());
    }

    #[test]
    fn alpha_clamped() {
        let m = model(&[1.0], Aggregation::Single);
        let x = features(&m, &[1.0], 1e9);
        assert_eq!(m.alpha(&x).unwrap(), 1e2);
        let x = features(&m, &[1.0], 1e-30);
        assert_eq!(m.alpha(&x).unwrap(), 1e-7);
    }

    #[test]
    fn rejects_bad_horizons() {
        let mut c = ModelConfig { horizons: vec![Horizon::Finite(2.0), Horizon::Finite(1.0)], ..ModelConfig::default() };
        assert!(c.validate().is_err());
        c.horizons = vec![Horizon::Infinite];
        assert!(c.validate().is_err());
    }

    #[test]
    fn json_version_checked() {
        let m = model(&[1.0], Aggregation::Single);
        let text = m.to_json().unwrap();
        assert_eq!(ForecastModel::<Slot>::from_json(&text).unwrap(), m);
        let bumped = text.replace("\"format_version\":1", "\"format_version\":9");
        assert!(matches!(ForecastModel::<Slot>::from_json(&bumped), Err(Error::SchemaVersion { .. })));
    }
}
