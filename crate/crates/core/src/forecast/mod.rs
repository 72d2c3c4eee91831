//! Horizon forecaster: learned point predictors extrapolated in closed form.

mod features;
mod gbdt;
mod growth;
mod model;
mod training;

pub use features::{extract_features, FeatureConfig, FeatureSchema, ItemState, FEATURE_SCHEMA_VERSION};
pub use gbdt::{fit_gbdt, GbdtParams, Learner, Regressor, Tree, TreeEnsemble};
pub use growth::{growth_margin, relative_growth_decision, GrowthDecision, GrowthRule};
pub use model::{Aggregation, ForecastModel, ModelConfig, MODEL_FORMAT, MODEL_FORMAT_VERSION};
pub use training::{
    build_training_set, count_label, observed_increment, sample_snapshots, SamplingPolicy, Snapshot,
    TrainingExample, TrainingSet,
};
