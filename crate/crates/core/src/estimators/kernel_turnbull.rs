//! Covariate-localised Turnbull estimator.
//!
//! At a query covariate `x` each training row gets a Gaussian product-kernel
//! weight `K((x - x_i) / h)`; the weighted self-consistency iteration over the
//! global support windows then gives a conditional step CDF.

use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::estimators::turnbull::{cumulative, self_consistency, step_cdf, step_invert, SupportStructure};
use crate::estimators::ConditionalCdf;
use crate::math::sample_sd;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelTurnbullFit {
    pub structure: SupportStructure,
    /// Covariates of the training rows, row-major.
    pub covariates: Vec<Vec<f64>>,
    pub bandwidth: Vec<f64>,
    /// Unweighted NPMLE masses, used to warm-start the local fits.
    pub global_masses: Vec<f64>,
    pub tol: f64,
    pub max_iter: usize,
}

/// Silverman's rule `1.06 sd n^(-1/5)` per coordinate (1 when the sd is 0).
pub fn rule_of_thumb_bandwidth(covariates: &[Vec<f64>], dim: usize) -> Vec<f64> {
    let n = covariates.len().max(1) as f64;
    (0..dim)
        .map(|k| {
            let col: Vec<f64> = covariates.iter().map(|x| x[k]).collect();
            let sd = sample_sd(&col);
            if sd > 0.0 && sd.is_finite() {
                1.06 * sd * libm::pow(n, -0.2)
            } else {
                1.0
            }
        })
        .collect()
}

impl KernelTurnbullFit {
    pub fn fit(data: &Dataset, tol: f64, max_iter: usize, bandwidth: Option<Vec<f64>>) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if data.observations().iter().all(|o| o.is_right_censored()) {
            return Err(Error::Fit("Turnbull fit needs at least one finite interval".into()));
        }
        let structure = SupportStructure::build(data.observations())?;
        let covariates: Vec<Vec<f64>> = data.observations().iter().map(|o| o.x.clone()).collect();
        let dim = data.covariate_dim();
        let bandwidth = match bandwidth {
            Some(h) => {
                if h.len() != dim || h.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                    return Err(Error::InvalidConfig("bandwidth must have one positive entry per covariate".into()));
                }
                h
            }
            None => rule_of_thumb_bandwidth(&covariates, dim),
        };
        let n = data.len();
        let weights = vec![1.0 / n as f64; n];
        let init = vec![1.0 / structure.len() as f64; structure.len()];
        let global = self_consistency(&structure, &weights, init, tol, max_iter, false);
        Ok(Self { structure, covariates, bandwidth, global_masses: global.masses, tol, max_iter })
    }

    fn weights_at(&self, x: &[f64]) -> Vec<f64> {
        let logs: Vec<f64> = self
            .covariates
            .iter()
            .map(|xi| {
                -0.5 * xi
                    .iter()
                    .zip(x)
                    .zip(&self.bandwidth)
                    .map(|((a, b), h)| {
                        let z = (a - b) / h;
                        z * z
                    })
                    .sum::<f64>()
            })
            .collect();
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut w: Vec<f64> = logs.iter().map(|l| libm::exp(l - top)).collect();
        let total: f64 = w.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            let n = w.len() as f64;
            w.iter_mut().for_each(|v| *v = 1.0 / n);
        } else {
            w.iter_mut().for_each(|v| *v /= total);
        }
        w
    }

    /// Local NPMLE masses over the support windows at covariate `x`.
    pub fn masses_at(&self, x: &[f64]) -> Vec<f64> {
        let weights = self.weights_at(x);
        let uniform = 1.0 / self.structure.len() as f64;
        let init: Vec<f64> = self.global_masses.iter().map(|m| 0.5 * m + 0.5 * uniform).collect();
        self_consistency(&self.structure, &weights, init, self.tol, self.max_iter, false).masses
    }

    fn local_cum(&self, x: &[f64]) -> Vec<f64> {
        cumulative(&self.masses_at(x))
    }
}

impl ConditionalCdf for KernelTurnbullFit {
    fn cdf(&self, t: f64, x: &[f64]) -> f64 {
        step_cdf(&self.structure.supports, &self.local_cum(x), t)
    }

    fn name(&self) -> &'static str {
        "kturnbull"
    }

    fn cdf_pair(&self, l: f64, u: f64, x: &[f64]) -> (f64, f64) {
        let cum = self.local_cum(x);
        let f = |t: f64| {
            if t == f64::INFINITY {
                1.0
            } else {
                step_cdf(&self.structure.supports, &cum, t)
            }
        };
        (f(l), f(u))
    }

    fn invert_survival(&self, q: f64, x: &[f64], t_max: f64) -> f64 {
        step_invert(&self.structure.supports, &self.local_cum(x), q, t_max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::IntervalObservation;
    use crate::estimators::evaluate_cdf;
    use crate::estimators::turnbull::turnbull_fit;

    #[test]
    fn without_covariates_matches_turnbull() {
        let rows = vec![
            IntervalObservation { l: 0.0, u: 1.0, x: vec![] },
            IntervalObservation { l: 0.5, u: 2.0, x: vec![] },
            IntervalObservation { l: 1.5, u: f64::INFINITY, x: vec![] },
            IntervalObservation { l: 0.2, u: 0.7, x: vec![] },
        ];
        let d = Dataset::new(rows).unwrap();
        let k = KernelTurnbullFit::fit(&d, 1e-12, 10_000, None).unwrap();
        let t = turnbull_fit(&d, 1e-12, 10_000).unwrap();
        for s in [0.1, 0.7, 1.0, 2.0, 5.0] {
            assert!((evaluate_cdf(&k, s, &[]) - evaluate_cdf(&t, s, &[])).abs() < 1e-8);
        }
    }

    #[test]
    fn localises_on_covariate() {
        // Early events at x = 0, late events at x = 10.
        let mut rows = Vec::new();
        for i in 0..20 {
            let e = 0.1 * (i % 5) as f64;
            rows.push(IntervalObservation { l: e, u: e + 0.1, x: vec![0.0] });
            rows.push(IntervalObservation { l: 5.0 + e, u: 5.1 + e, x: vec![10.0] });
        }
        let d = Dataset::new(rows).unwrap();
        let k = KernelTurnbullFit::fit(&d, 1e-8, 5_000, Some(vec![1.0])).unwrap();
        assert!(evaluate_cdf(&k, 1.0, &[0.0]) > 0.99);
        assert!(evaluate_cdf(&k, 1.0, &[10.0]) < 0.01);
        let (a, b) = k.cdf_pair(0.0, f64::INFINITY, &[0.0]);
        assert_eq!((a, b), (0.0, 1.0));
    }

    #[test]
    fn bad_bandwidth_rejected() {
        let d = Dataset::new(vec![IntervalObservation { l: 0.0, u: 1.0, x: vec![1.0] }]).unwrap();
        assert!(KernelTurnbullFit::fit(&d, 1e-8, 10, Some(vec![0.0])).is_err());
        assert!(KernelTurnbullFit::fit(&d, 1e-8, 10, Some(vec![])).is_err());
    }
}
