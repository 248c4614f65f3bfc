//! Regression surfaces `r(x)` and covariate feature maps.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

/// Descriptor of the log-hazard shift `r(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Link {
    /// `r(x) = 0`.
    Zero,
    /// `r(x) = sum_k c_k x_k`.
    Linear { coefs: Vec<f64> },
    /// `r(x) = sum_k c_k |x_k|`.
    AbsLinear { coefs: Vec<f64> },
    /// `r(x) = |a x_k - c|`.
    AbsAffine { index: usize, a: f64, c: f64 },
    /// `r(x) = sin(pi x_0) + 2 |x_1 - 0.5| + x_2^3`.
    SinAbsCubic,
}

impl Link {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Link::Zero => 0.0,
            Link::Linear { coefs } => coefs.iter().zip(x).map(|(c, v)| c * v).sum(),
            Link::AbsLinear { coefs } => coefs.iter().zip(x).map(|(c, v)| c * libm::fabs(*v)).sum(),
            Link::AbsAffine { index, a, c } => libm::fabs(a * x[*index] - c),
            Link::SinAbsCubic => {
                libm::sin(core::f64::consts::PI * x[0]) + 2.0 * libm::fabs(x[1] - 0.5) + x[2] * x[2] * x[2]
            }
        }
    }

    /// Smallest covariate dimension the link can be evaluated on.
    pub fn min_dim(&self) -> usize {
        match self {
            Link::Zero => 0,
            Link::Linear { coefs } | Link::AbsLinear { coefs } => coefs.len(),
            Link::AbsAffine { index, .. } => index + 1,
            Link::SinAbsCubic => 3,
        }
    }
}

/// Transformation applied to covariates before a linear predictor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureMap {
    #[default]
    Identity,
    Abs,
}

impl FeatureMap {
    pub fn apply_into(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        match self {
            FeatureMap::Identity => out.extend_from_slice(x),
            FeatureMap::Abs => out.extend(x.iter().map(|v| libm::fabs(*v))),
        }
    }

    #[inline]
    pub fn feature(&self, v: f64) -> f64 {
        match self {
            FeatureMap::Identity => v,
            FeatureMap::Abs => libm::fabs(v),
        }
    }
}
