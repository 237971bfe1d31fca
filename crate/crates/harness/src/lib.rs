//! Scenario files, Monte Carlo ensembles and the statistical checks that
//! verify the reduction dynamics of `collapse_core`.

// `!(x > 0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod config;
pub mod constants;
pub mod ensemble;
pub mod output;
pub mod presets;
pub mod rng;
pub mod units;
pub mod validation;

pub use config::{ConfigError, Scenario, ScenarioConfig};
pub use ensemble::{run_ensemble, run_ensemble_with, simulate_path, EnsembleOptions, EnsembleResult};
