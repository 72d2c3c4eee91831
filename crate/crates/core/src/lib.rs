//! Popularity forecasting over arbitrary horizons with exponential-kernel
//! Hawkes processes: simulation, estimators, forecaster, baselines and
//! evaluation.

// `!(x > 0.0)` deliberately rejects NaN alongside out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod cascade;
pub mod error;
pub mod estimators;
pub mod eval;
pub mod forecast;
pub mod hawkes;
pub mod io;
pub mod sim;
pub mod time;

pub use cascade::{Cascade, Event};
pub use error::{Error, Result};
pub use time::Horizon;
