//! Metrics, experiment orchestration and the prediction-cost benchmark.

mod bench;
mod experiment;
mod metrics;
mod report;

pub use bench::{bench_prediction_cost, loglog_slope, max_min_ratio, mean_at, synthetic_cascade, BenchConfig};
pub use experiment::{
    dataset_fingerprint, default_horizon_grid, hwk_name, run_experiment, split_indices, Experiment, ExperimentConfig,
    ModelKind, TrainedModel, HF_DENSE_NAME, HF_SPARSE_NAME, PB_NAME, RPP_NAME, SEISMIC_NAME, SPLITS,
};
pub use metrics::{kendall_tau, mape, median, pair_counts, rmse, Mape, PairCounts};
pub use report::{
    fingerprint, sha256_hex, timing_csv, CellMetrics, EvalReport, TimingRow, TrainingSummary, REPORT_FORMAT_VERSION,
};
