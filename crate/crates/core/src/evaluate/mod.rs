//! Experiment harness: coverage, conditional coverage, goodness of fit and
//! checks of the interval-measure theory.
//!
//! Every replicated experiment is split into a per-replication kernel (a pure
//! function of the master seed and the replication index) and an aggregation
//! step, so callers may run replications in any order or in parallel.

use alloc::string::String;
use serde::{Deserialize, Serialize};

use crate::conformal::{Mode, PredictionSet, Uncervals, UncervalsConfig};
use crate::data::{make_split, Dataset};
use crate::estimators::{default_t_max, ConditionalCdf, EstimatorSpec, FittedModel};
use crate::rng::{derive_seed, STREAM_SPLIT};
use crate::Result;

pub mod condcov;
pub mod coverage;
pub mod gof;
pub mod smoother;
pub mod unbiased;
pub mod vc;

pub use condcov::{conditional_coverage_curve, ConditionalCoverageCurve};
pub use coverage::{marginal_coverage, CoverageReport};
pub use gof::{gof_uniformity, GofReport};
pub use unbiased::{unbiasedness_check, UnbiasednessReport};
pub use vc::{vc_shatter_search, VcReport};

/// Sub-stream deriving the per-replication seed from the master seed.
pub const STREAM_REP: &str = "rep";

pub fn replication_seed(master: u64, rep: usize) -> u64 {
    derive_seed(master, STREAM_REP, rep as u64)
}

/// Lower bound from the `alpha` quantile of the fitted model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NaiveLpb {
    pub time: f64,
    /// The model's CDF never reached `alpha` on `[0, t_max]`; `time` is
    /// then `t_max`.
    pub plateau: bool,
}

/// `inf { t : F(t | x) >= alpha }`, or `t_max` (flagged) on a plateau.
pub fn naive_quantile_lpb<M: ConditionalCdf + ?Sized>(model: &M, x: &[f64], alpha: f64, t_max: f64) -> NaiveLpb {
    let t = model.invert_survival(1.0 - alpha, x, t_max);
    if t.is_finite() {
        NaiveLpb { time: t, plateau: false }
    } else {
        NaiveLpb { time: t_max, plateau: true }
    }
}

/// A prediction method evaluated by the harness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum Method {
    Uncervals {
        mode: Mode,
        #[serde(default = "default_b")]
        b: f64,
        #[serde(default = "default_fit_fraction")]
        fit_fraction: f64,
        estimator: EstimatorSpec,
    },
    /// `alpha` quantile of the model fitted on the same training split.
    NaiveQuantile {
        #[serde(default = "default_fit_fraction")]
        fit_fraction: f64,
        estimator: EstimatorSpec,
    },
}

fn default_b() -> f64 {
    1.0
}

fn default_fit_fraction() -> f64 {
    0.5
}

impl Method {
    pub fn uncervals(mode: Mode, estimator: EstimatorSpec) -> Self {
        Method::Uncervals { mode, b: 1.0, fit_fraction: 0.5, estimator }
    }

    pub fn naive(estimator: EstimatorSpec) -> Self {
        Method::NaiveQuantile { fit_fraction: 0.5, estimator }
    }

    pub fn label(&self) -> String {
        match self {
            Method::Uncervals { mode, estimator, .. } => {
                alloc::format!("uncervals-{}-{}", mode.as_str(), estimator.kind().as_str())
            }
            Method::NaiveQuantile { estimator, .. } => {
                alloc::format!("naive-{}", estimator.kind().as_str())
            }
        }
    }

    /// Fits the method on `train` at level `alpha` with run seed `seed`.
    pub fn fit(&self, train: &Dataset, alpha: f64, seed: u64) -> Result<FittedMethod> {
        match self {
            Method::Uncervals { mode, b, fit_fraction, estimator } => {
                let config = UncervalsConfig {
                    alpha,
                    b: *b,
                    mode: *mode,
                    fit_fraction: *fit_fraction,
                    seed,
                    estimator: estimator.clone(),
                    t_max: None,
                };
                Ok(FittedMethod::Conformal(Uncervals::fit(train, &config)?))
            }
            Method::NaiveQuantile { fit_fraction, estimator } => {
                let split = make_split(train.len(), *fit_fraction, derive_seed(seed, STREAM_SPLIT, 0))?;
                let fit_rows = train.subset(&split.fit_indices)?;
                let model = estimator.fit(&fit_rows)?;
                Ok(FittedMethod::Naive { model, alpha, t_max: default_t_max(&fit_rows) })
            }
        }
    }
}

/// A fitted method mapping covariates to prediction sets.
#[derive(Debug, Clone)]
pub enum FittedMethod {
    Conformal(Uncervals),
    Naive { model: FittedModel, alpha: f64, t_max: f64 },
}

impl FittedMethod {
    pub fn predict(&self, x: &[f64]) -> PredictionSet {
        match self {
            FittedMethod::Conformal(u) => u.predict(x),
            FittedMethod::Naive { model, alpha, t_max } => {
                let lpb = naive_quantile_lpb(model, x, *alpha, *t_max);
                PredictionSet { x: x.to_vec(), alpha: *alpha, b: 1.0, lo: lpb.time, hi: f64::INFINITY }
            }
        }
    }

    pub fn model(&self) -> &FittedModel {
        match self {
            FittedMethod::Conformal(u) => &u.model,
            FittedMethod::Naive { model, .. } => model,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::turnbull::{SupportInterval, TurnbullFit};
    use crate::estimators::OracleModel;
    use crate::link::Link;
    use alloc::vec;

    #[test]
    fn naive_quantile_closed_form() {
        let m = OracleModel::new(2.0, 1.0, Link::Zero).unwrap();
        let alpha = 1.0 - libm::exp(-1.0);
        let lpb = naive_quantile_lpb(&m, &[], alpha, 10.0);
        assert!(!lpb.plateau);
        assert!((lpb.time - 1.0).abs() < 1e-8);
        let small = naive_quantile_lpb(&m, &[], 1e-10, 10.0);
        assert!(small.time < 1e-4);
    }

    #[test]
    fn naive_quantile_plateau_is_flagged() {
        let fit = TurnbullFit::from_masses(
            vec![SupportInterval { left: 0.0, right: 1.0 }, SupportInterval { left: 2.0, right: f64::INFINITY }],
            vec![0.3, 0.7],
            0,
            0.0,
            true,
            0.0,
            vec![],
        );
        let lpb = naive_quantile_lpb(&fit, &[], 0.5, 20.0);
        assert!(lpb.plateau);
        assert_eq!(lpb.time, 20.0);
    }
}
