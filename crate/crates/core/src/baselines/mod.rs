//! Comparison methods: reinforced Poisson process, SEISMIC, and per-horizon
//! and horizon-as-feature regressors.

mod hf;
mod optim;
mod pb;
mod rpp;
mod seismic;

pub use hf::{dense_horizons, sparse_horizons, train_hf, HfModel};
pub use pb::{train_pb, PbModel};
pub use rpp::{rpp_fit, rpp_log_likelihood, rpp_predict, rpp_simulate, RppFit, RppFitConfig, RppParams, TIME_FLOOR};
pub use seismic::{
    seismic_estimate_p, seismic_final_size, seismic_predict, SeismicConfig, SeismicPrediction, DEFAULT_DEGREE,
    DEFAULT_TAU_CUT, DEFAULT_THETA,
};
