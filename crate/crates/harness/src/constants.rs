//! Statistical thresholds shared by every Monte Carlo check.
//!
//! The limit theorems being tested say nothing about finite-N tolerances;
//! these multipliers are engineering choices and live here so they can be
//! audited in one place.

/// Two-sided tolerance for sample means, in standard errors.
pub const MEAN_SE: f64 = 4.0;
/// One-sided tolerance for empirical probabilities against upper bounds.
pub const BOUND_SE: f64 = 3.0;
/// Slack allowed when checking that a sequence of means is non-increasing.
pub const MONOTONE_SE: f64 = 2.0;
/// Born-rule z-score limit.
pub const BORN_Z: f64 = 4.0;
/// Minimum p-value for distributional (KS, χ²) tests.
pub const MIN_P_VALUE: f64 = 0.001;
/// Mean-density agreement, in bootstrap standard errors.
pub const BOOTSTRAP_SE: f64 = 5.0;
/// Bootstrap resamples per estimate.
pub const BOOTSTRAP_RESAMPLES: usize = 200;
/// Relative tolerance on fitted decay rates.
pub const RATE_FIT_TOLERANCE: f64 = 0.10;
/// Default collapse threshold δ: collapsed when some `π_j > 1 - δ`.
pub const DEFAULT_COLLAPSE_THRESHOLD: f64 = 1e-6;
/// Default horizon, in units of `1/Γ_min`.
pub const DEFAULT_HORIZON_RATES: f64 = 10.0;
/// Default number of grid steps when neither `dt` nor `steps` is given.
pub const DEFAULT_STEPS: usize = 400;
/// Minimum fraction of collapsed paths required by the Born-rule check.
pub const MIN_COLLAPSED_FRACTION: f64 = 0.999;
/// Paths per reduction chunk; fixed so that aggregation order never depends
/// on the thread count.
pub const CHUNK: usize = 256;
/// Born-rule acceptance half-width for the two-level acceptance runs, in
/// binomial standard errors.
pub const BORN_ACCEPTANCE_SE: f64 = 3.0;
/// Master seed used by `validate` unless overridden.
pub const DEFAULT_VALIDATION_SEED: u64 = 20_240_917;
