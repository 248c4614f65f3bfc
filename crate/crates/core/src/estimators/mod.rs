//! Conditional CDF models `F(t | x)` fitted on the training split.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::link::{FeatureMap, Link};
use crate::Result;

pub mod kernel_turnbull;
pub mod optim;
pub mod oracle;
pub mod turnbull;
pub mod weibull;

pub use kernel_turnbull::KernelTurnbullFit;
pub use oracle::OracleModel;
pub use turnbull::TurnbullFit;
pub use weibull::WeibullPhFit;

/// Absolute tolerance of the bisection used by smooth models.
pub const INVERSION_TOLERANCE: f64 = 1e-9;

/// A fitted conditional distribution of the event time given covariates.
///
/// Implementations must be nondecreasing in `t`; `cdf(+inf, x)` is 1 by
/// convention, which [`evaluate_cdf`] enforces.
pub trait ConditionalCdf {
    fn cdf(&self, t: f64, x: &[f64]) -> f64;

    fn name(&self) -> &'static str;

    fn survival(&self, t: f64, x: &[f64]) -> f64 {
        1.0 - evaluate_cdf(self, t, x)
    }

    /// Unclamped `(F(l | x), F(u | x))` with `F(+inf | x) = 1`; overridden
    /// where both evaluations share expensive setup.
    fn cdf_pair(&self, l: f64, u: f64, x: &[f64]) -> (f64, f64) {
        let raw = |t: f64| if t == f64::INFINITY { 1.0 } else { self.cdf(t, x) };
        (raw(l), raw(u))
    }

    /// `inf { t >= 0 : S(t | x) <= q }`, searched on `[0, t_max]`.
    ///
    /// Returns 0 when `S(0 | x) <= q` and `+inf` when `S(t_max | x) > q`.
    /// The default bisects to [`INVERSION_TOLERANCE`].
    fn invert_survival(&self, q: f64, x: &[f64], t_max: f64) -> f64 {
        bisect_survival(|t| self.survival(t, x), q, t_max)
    }
}

/// `F(t | x)` clamped to `[0, 1]`, with `F(+inf | x) = 1` and `F(t <= 0) >= 0`.
pub fn evaluate_cdf<M: ConditionalCdf + ?Sized>(model: &M, t: f64, x: &[f64]) -> f64 {
    if t == f64::INFINITY {
        return 1.0;
    }
    model.cdf(t, x).clamp(0.0, 1.0)
}

pub(crate) fn bisect_survival<S: Fn(f64) -> f64>(survival: S, q: f64, t_max: f64) -> f64 {
    if survival(0.0) <= q {
        return 0.0;
    }
    if !(t_max > 0.0) || survival(t_max) > q {
        return f64::INFINITY;
    }
    let (mut lo, mut hi) = (0.0, t_max);
    while hi - lo > INVERSION_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if survival(mid) <= q {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Default search horizon: ten times the largest finite endpoint.
pub fn default_t_max(train: &Dataset) -> f64 {
    let m = train.max_finite_endpoint();
    if m > 0.0 {
        10.0 * m
    } else {
        1.0
    }
}

/// Estimator family, as named on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Turnbull,
    Weibph,
    Oracle,
    Kturnbull,
}

impl ModelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::Turnbull => "turnbull",
            ModelKind::Weibph => "weibph",
            ModelKind::Oracle => "oracle",
            ModelKind::Kturnbull => "kturnbull",
        }
    }
}

/// Everything needed to fit one estimator on a training split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum EstimatorSpec {
    Turnbull {
        #[serde(default = "defaults::turnbull_tol")]
        tol: f64,
        #[serde(default = "defaults::turnbull_iter")]
        max_iter: usize,
    },
    Kturnbull {
        #[serde(default = "defaults::kturnbull_tol")]
        tol: f64,
        #[serde(default = "defaults::kturnbull_iter")]
        max_iter: usize,
        /// Per-coordinate bandwidths; rule-of-thumb when absent.
        #[serde(default)]
        bandwidth: Option<Vec<f64>>,
    },
    Weibph {
        #[serde(default = "defaults::weibph_tol")]
        tol: f64,
        #[serde(default = "defaults::weibph_iter")]
        max_iter: usize,
        #[serde(default)]
        features: FeatureMap,
    },
    Oracle {
        shape: f64,
        scale: f64,
        link: Link,
    },
}

mod defaults {
    pub fn turnbull_tol() -> f64 {
        1e-8
    }
    pub fn turnbull_iter() -> usize {
        10_000
    }
    pub fn kturnbull_tol() -> f64 {
        1e-6
    }
    pub fn kturnbull_iter() -> usize {
        2_000
    }
    pub fn weibph_tol() -> f64 {
        1e-7
    }
    pub fn weibph_iter() -> usize {
        500
    }
}

impl EstimatorSpec {
    pub fn turnbull() -> Self {
        EstimatorSpec::Turnbull { tol: defaults::turnbull_tol(), max_iter: defaults::turnbull_iter() }
    }

    pub fn kernel_turnbull() -> Self {
        EstimatorSpec::Kturnbull {
            tol: defaults::kturnbull_tol(),
            max_iter: defaults::kturnbull_iter(),
            bandwidth: None,
        }
    }

    pub fn weibull_ph(features: FeatureMap) -> Self {
        EstimatorSpec::Weibph { tol: defaults::weibph_tol(), max_iter: defaults::weibph_iter(), features }
    }

    pub fn oracle(shape: f64, scale: f64, link: Link) -> Self {
        EstimatorSpec::Oracle { shape, scale, link }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            EstimatorSpec::Turnbull { .. } => ModelKind::Turnbull,
            EstimatorSpec::Kturnbull { .. } => ModelKind::Kturnbull,
            EstimatorSpec::Weibph { .. } => ModelKind::Weibph,
            EstimatorSpec::Oracle { .. } => ModelKind::Oracle,
        }
    }

    pub fn fit(&self, train: &Dataset) -> Result<FittedModel> {
        Ok(match self {
            EstimatorSpec::Turnbull { tol, max_iter } => {
                FittedModel::Turnbull(turnbull::turnbull_fit(train, *tol, *max_iter)?)
            }
            EstimatorSpec::Kturnbull { tol, max_iter, bandwidth } => {
                FittedModel::Kturnbull(KernelTurnbullFit::fit(train, *tol, *max_iter, bandwidth.clone())?)
            }
            EstimatorSpec::Weibph { tol, max_iter, features } => {
                let opts = weibull::WeibullOptions { tol: *tol, max_iter: *max_iter, features: *features, init: None };
                FittedModel::Weibph(weibull::weibull_ph_fit(train, &opts)?)
            }
            EstimatorSpec::Oracle { shape, scale, link } => {
                FittedModel::Oracle(OracleModel::new(*shape, *scale, link.clone())?)
            }
        })
    }
}

/// Any fitted estimator; serialises with a `model` tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum FittedModel {
    Turnbull(TurnbullFit),
    Kturnbull(KernelTurnbullFit),
    Weibph(WeibullPhFit),
    Oracle(OracleModel),
}

impl FittedModel {
    fn inner(&self) -> &dyn ConditionalCdf {
        match self {
            FittedModel::Turnbull(m) => m,
            FittedModel::Kturnbull(m) => m,
            FittedModel::Weibph(m) => m,
            FittedModel::Oracle(m) => m,
        }
    }
}

impl ConditionalCdf for FittedModel {
    fn cdf(&self, t: f64, x: &[f64]) -> f64 {
        self.inner().cdf(t, x)
    }
    fn name(&self) -> &'static str {
        self.inner().name()
    }
    fn survival(&self, t: f64, x: &[f64]) -> f64 {
        self.inner().survival(t, x)
    }
    fn cdf_pair(&self, l: f64, u: f64, x: &[f64]) -> (f64, f64) {
        self.inner().cdf_pair(l, u, x)
    }
    fn invert_survival(&self, q: f64, x: &[f64], t_max: f64) -> f64 {
        self.inner().invert_survival(q, x, t_max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Linear;
    impl ConditionalCdf for Linear {
        fn cdf(&self, t: f64, _x: &[f64]) -> f64 {
            (t / 2.0).min(1.0)
        }
        fn name(&self) -> &'static str {
            "linear"
        }
    }

    #[test]
    fn bisection_rules() {
        let m = Linear;
        assert_eq!(m.invert_survival(1.0, &[], 10.0), 0.0);
        let t = m.invert_survival(0.5, &[], 10.0);
        assert!((t - 1.0).abs() < 2e-9);
        // horizon too short: the survival plateau stays above q
        assert_eq!(m.invert_survival(0.1, &[], 1.0), f64::INFINITY);
        assert_eq!(evaluate_cdf(&m, f64::INFINITY, &[]), 1.0);
    }
}
