//! Conformal uncertainty quantification for interval-censored targets.
//!
//! The crate is `no_std` (with `alloc`) and contains every numerical piece of
//! the pipeline:
//!
//! - [`data`]: interval observations, datasets and seeded train/calibration splits.
//! - [`simgen`]: Weibull accelerated-failure-time responses censored by random
//!   inspection schedules.
//! - [`estimators`]: conditional CDF models fitted on the training split
//!   (Turnbull NPMLE, kernel-localised Turnbull, Weibull proportional hazards,
//!   and the closed-form oracle).
//! - [`conformal`]: border scores, bootstrap of the probability-integral
//!   values, conformal quantile and prediction sets.
//! - [`evaluate`]: Monte Carlo coverage, conditional coverage error,
//!   goodness-of-fit and the non-shattering search.
//!
//! IO, parallel replication and the command line live in the `uncervals`
//! companion crate.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod conformal;
pub mod data;
pub mod error;
pub mod estimators;
pub mod evaluate;
pub mod link;
pub mod math;
pub mod rng;
pub mod serde_f64;
pub mod simgen;

pub use conformal::{
    bootstrap_phi, border_scores, calibrate, conformal_quantile, interval_distribution, prediction_set, psi, uncervals,
    BorderScores, CalibrationResult, Mode, PredictionSet, UncervalsConfig,
};
pub use data::{make_split, Dataset, IntervalObservation, SplitPlan};
pub use error::Error;
pub use estimators::{ConditionalCdf, EstimatorSpec, FittedModel, ModelKind};
pub use link::{FeatureMap, Link};
pub use simgen::{simulate, CovariateLaw, Scenario, SimConfig, SimOutput};

pub type Result<T> = core::result::Result<T, Error>;
