//! Parametric Weibull proportional-hazards model for interval-censored rows.
//!
//! Cumulative hazard `H(t | x) = (s t)^p exp(z^T beta)` where `z` is the
//! feature map of `x`; parameters are `theta = (log s, log p, beta)`.
//! Row contributions to the log-likelihood:
//!
//! | row                     | contribution            |
//! |-------------------------|-------------------------|
//! | `0 < l < u < inf`       | `log(S(l) - S(u))`      |
//! | `u = inf`               | `log S(l)`              |
//! | `l = 0`, `u < inf`      | `log(1 - S(u))`         |
//! | `l == u` (exact)        | `log f(t)`              |
//!
//! With `g(t) = dH/dtheta / H = (p, p (log s + log t), z)` every gradient is
//! a combination of `H g` at the endpoints.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::estimators::optim::{minimize, BfgsOptions};
use crate::estimators::ConditionalCdf;
use crate::link::FeatureMap;
use crate::math::{compensated_sum, invert_dense, log1mexp, norm2};
use crate::simgen::weibull_ph_survival;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeibullPhFit {
    pub log_scale: f64,
    pub log_shape: f64,
    pub beta: Vec<f64>,
    #[serde(default)]
    pub features: FeatureMap,
    pub converged: bool,
    pub grad_norm: f64,
    pub loglik: f64,
    pub iterations: usize,
}

impl WeibullPhFit {
    pub fn scale(&self) -> f64 {
        libm::exp(self.log_scale)
    }

    pub fn shape(&self) -> f64 {
        libm::exp(self.log_shape)
    }

    pub fn theta(&self) -> Vec<f64> {
        let mut t = vec![self.log_scale, self.log_shape];
        t.extend_from_slice(&self.beta);
        t
    }

    pub fn linear_predictor(&self, x: &[f64]) -> f64 {
        self.beta.iter().zip(x).map(|(b, v)| b * self.features.feature(*v)).sum()
    }
}

impl ConditionalCdf for WeibullPhFit {
    fn cdf(&self, t: f64, x: &[f64]) -> f64 {
        1.0 - weibull_ph_survival(t, self.shape(), self.scale(), self.linear_predictor(x))
    }

    fn survival(&self, t: f64, x: &[f64]) -> f64 {
        weibull_ph_survival(t, self.shape(), self.scale(), self.linear_predictor(x))
    }

    fn name(&self) -> &'static str {
        "weibph"
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum RowKind {
    Interval,
    Right,
    Left,
    Exact,
}

#[derive(Debug, Clone)]
struct Row {
    kind: RowKind,
    log_l: f64,
    log_u: f64,
    z: Vec<f64>,
}

/// Log-likelihood of the Weibull PH model on a fixed dataset.
#[derive(Debug, Clone)]
pub struct WeibullPhLikelihood {
    rows: Vec<Row>,
    dim: usize,
}

impl WeibullPhLikelihood {
    pub fn new(data: &Dataset, features: FeatureMap) -> Self {
        let mut z = Vec::new();
        let rows = data
            .observations()
            .iter()
            .map(|o| {
                features.apply_into(&o.x, &mut z);
                let kind = if o.is_exact() {
                    RowKind::Exact
                } else if o.is_right_censored() {
                    RowKind::Right
                } else if o.l == 0.0 {
                    RowKind::Left
                } else {
                    RowKind::Interval
                };
                let (log_l, log_u) = match kind {
                    RowKind::Exact => (libm::log(o.u), libm::log(o.u)),
                    _ => (libm::log(o.l), libm::log(o.u)),
                };
                Row { kind, log_l, log_u, z: z.clone() }
            })
            .collect();
        Self { rows, dim: data.covariate_dim() }
    }

    pub fn n_params(&self) -> usize {
        2 + self.dim
    }

    /// Log-likelihood at `theta`; the gradient is written into `grad`.
    pub fn value_grad(&self, theta: &[f64], grad: &mut [f64]) -> f64 {
        let k = self.n_params();
        let log_s = theta[0];
        let p = libm::exp(theta[1]);
        let beta = &theta[2..];
        let mut terms = Vec::with_capacity(self.rows.len());
        let mut gparts: Vec<Vec<f64>> = vec![Vec::with_capacity(self.rows.len()); k];
        let mut g_l = vec![0.0; k];
        let mut g_u = vec![0.0; k];
        let mut row_grad = vec![0.0; k];

        // H g at log-time `lt`; returns H.
        let h_and_g = |lt: f64, eta: f64, z: &[f64], out: &mut [f64]| -> f64 {
            let a = log_s + lt;
            let h = libm::exp(p * a + eta);
            out[0] = p * h;
            out[1] = p * a * h;
            for (o, zi) in out[2..].iter_mut().zip(z) {
                *o = zi * h;
            }
            h
        };

        for row in &self.rows {
            let eta: f64 = beta.iter().zip(&row.z).map(|(b, z)| b * z).sum();
            let value = match row.kind {
                RowKind::Right => {
                    if row.log_l == f64::NEG_INFINITY {
                        row_grad.iter_mut().for_each(|v| *v = 0.0);
                        0.0
                    } else {
                        let hl = h_and_g(row.log_l, eta, &row.z, &mut g_l);
                        for i in 0..k {
                            row_grad[i] = -g_l[i];
                        }
                        -hl
                    }
                }
                RowKind::Left => {
                    let hu = h_and_g(row.log_u, eta, &row.z, &mut g_u);
                    let em1 = libm::expm1(hu);
                    for i in 0..k {
                        row_grad[i] = g_u[i] / em1;
                    }
                    log1mexp(hu)
                }
                RowKind::Interval => {
                    let hl = h_and_g(row.log_l, eta, &row.z, &mut g_l);
                    let hu = h_and_g(row.log_u, eta, &row.z, &mut g_u);
                    let d = hu - hl;
                    let em1 = libm::expm1(d);
                    for i in 0..k {
                        row_grad[i] = -g_l[i] + (g_u[i] - g_l[i]) / em1;
                    }
                    -hl + log1mexp(d)
                }
                RowKind::Exact => {
                    let h = h_and_g(row.log_u, eta, &row.z, &mut g_u);
                    // log f = log p + log H - log t - H
                    for i in 0..k {
                        row_grad[i] = -g_u[i];
                    }
                    row_grad[0] += p;
                    row_grad[1] += 1.0 + p * (log_s + row.log_u);
                    for (i, zi) in row.z.iter().enumerate() {
                        row_grad[2 + i] += zi;
                    }
                    theta[1] + libm::log(h) - row.log_u - h
                }
            };
            terms.push(value);
            for i in 0..k {
                gparts[i].push(row_grad[i]);
            }
        }
        for i in 0..k {
            grad[i] = compensated_sum(gparts[i].iter().copied());
        }
        compensated_sum(terms)
    }

    pub fn value(&self, theta: &[f64]) -> f64 {
        let mut g = vec![0.0; self.n_params()];
        self.value_grad(theta, &mut g)
    }

    /// Observed information `-d2 loglik / dtheta2` by central differences of
    /// the analytic gradient.
    pub fn observed_information(&self, theta: &[f64]) -> Vec<f64> {
        let k = self.n_params();
        let mut info = vec![0.0; k * k];
        let mut gp = vec![0.0; k];
        let mut gm = vec![0.0; k];
        let mut t = theta.to_vec();
        for j in 0..k {
            let h = 1e-5 * libm::fabs(theta[j]).max(1.0);
            t[j] = theta[j] + h;
            self.value_grad(&t, &mut gp);
            t[j] = theta[j] - h;
            self.value_grad(&t, &mut gm);
            t[j] = theta[j];
            for i in 0..k {
                info[i * k + j] = -(gp[i] - gm[i]) / (2.0 * h);
            }
        }
        // symmetrise
        for i in 0..k {
            for j in (i + 1)..k {
                let v = 0.5 * (info[i * k + j] + info[j * k + i]);
                info[i * k + j] = v;
                info[j * k + i] = v;
            }
        }
        info
    }

    /// Standard errors of `theta` from the inverse observed information.
    pub fn standard_errors(&self, theta: &[f64]) -> Option<Vec<f64>> {
        let k = self.n_params();
        let inv = invert_dense(&self.observed_information(theta), k)?;
        let se: Vec<f64> = (0..k).map(|i| libm::sqrt(inv[i * k + i])).collect();
        se.iter().all(|v| v.is_finite()).then_some(se)
    }
}

#[derive(Debug, Clone)]
pub struct WeibullOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub features: FeatureMap,
    /// Starting `theta`; a data-driven guess when absent.
    pub init: Option<Vec<f64>>,
}

impl Default for WeibullOptions {
    fn default() -> Self {
        Self { tol: 1e-7, max_iter: 500, features: FeatureMap::Identity, init: None }
    }
}

fn default_init(data: &Dataset) -> Vec<f64> {
    // log s from the mean of finite interval midpoints (right-censored rows use l).
    let mids: Vec<f64> = data
        .observations()
        .iter()
        .map(|o| if o.u.is_finite() { 0.5 * (o.l + o.u) } else { o.l })
        .filter(|v| *v > 0.0)
        .collect();
    let m = if mids.is_empty() { 1.0 } else { mids.iter().sum::<f64>() / mids.len() as f64 };
    let mut theta = vec![-libm::log(m), 0.0];
    theta.extend(core::iter::repeat_n(0.0, data.covariate_dim()));
    theta
}

/// Maximum-likelihood fit by BFGS on `theta`; restarts once from a perturbed
/// start if the first run does not converge.
pub fn weibull_ph_fit(data: &Dataset, opts: &WeibullOptions) -> Result<WeibullPhFit> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if data.observations().iter().all(|o| o.is_right_censored()) {
        return Err(Error::Fit("need at least one row that is not right-censored".into()));
    }
    let lik = WeibullPhLikelihood::new(data, opts.features);
    let init = match &opts.init {
        Some(t) if t.len() == lik.n_params() => t.clone(),
        Some(t) => {
            return Err(Error::InvalidConfig(format!(
                "init has {} parameters, model needs {}",
                t.len(),
                lik.n_params()
            )))
        }
        None => default_init(data),
    };
    if !lik.value(&init).is_finite() {
        return Err(Error::NonFinite("log-likelihood at the initial parameters".into()));
    }
    let bfgs = BfgsOptions { grad_tol: opts.tol, max_iter: opts.max_iter };
    let objective = |theta: &[f64], g: &mut [f64]| {
        let v = lik.value_grad(theta, g);
        g.iter_mut().for_each(|gi| *gi = -*gi);
        let out = -v;
        if out.is_finite() && g.iter().all(|gi| gi.is_finite()) {
            out
        } else {
            f64::INFINITY
        }
    };
    let mut result = minimize(objective, &init, &bfgs);
    if !result.converged {
        let perturbed: Vec<f64> =
            result.x.iter().enumerate().map(|(i, v)| v + if i % 2 == 0 { 0.05 } else { -0.05 }).collect();
        let start = if lik.value(&perturbed).is_finite() { perturbed } else { init.clone() };
        let retry = minimize(objective, &start, &bfgs);
        if retry.converged || retry.value < result.value {
            result = retry;
        }
    }
    let mut grad = vec![0.0; lik.n_params()];
    let loglik = lik.value_grad(&result.x, &mut grad);
    Ok(WeibullPhFit {
        log_scale: result.x[0],
        log_shape: result.x[1],
        beta: result.x[2..].to_vec(),
        features: opts.features,
        converged: result.converged,
        grad_norm: norm2(&grad),
        loglik,
        iterations: result.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::IntervalObservation;

    fn mixed_rows() -> Dataset {
        Dataset::new(vec![
            IntervalObservation { l: 0.2, u: 0.9, x: vec![0.5] },
            IntervalObservation { l: 0.0, u: 0.4, x: vec![-1.0] },
            IntervalObservation { l: 1.1, u: f64::INFINITY, x: vec![0.3] },
            IntervalObservation { l: 0.7, u: 0.7, x: vec![1.5] },
            IntervalObservation { l: 0.5, u: 2.5, x: vec![-0.2] },
        ])
        .unwrap()
    }

    #[test]
    fn row_contributions_match_survival_forms() {
        let d = mixed_rows();
        let lik = WeibullPhLikelihood::new(&d, FeatureMap::Identity);
        let theta = [0.1, 0.4, -0.3];
        let (s, p, b) = (libm::exp(0.1), libm::exp(0.4), -0.3);
        let surv = |t: f64, x: f64| weibull_ph_survival(t, p, s, b * x);
        let dens = |t: f64, x: f64| {
            let h = libm::pow(s * t, p) * libm::exp(b * x);
            p * h / t * libm::exp(-h)
        };
        let expected = libm::log(surv(0.2, 0.5) - surv(0.9, 0.5))
            + libm::log(1.0 - surv(0.4, -1.0))
            + libm::log(surv(1.1, 0.3))
            + libm::log(dens(0.7, 1.5))
            + libm::log(surv(0.5, -0.2) - surv(2.5, -0.2));
        assert!((lik.value(&theta) - expected).abs() < 1e-12);
    }

    #[test]
    fn right_censored_at_zero_contributes_nothing() {
        let d = Dataset::new(vec![
            IntervalObservation { l: 0.0, u: f64::INFINITY, x: vec![] },
            IntervalObservation { l: 0.0, u: 1.0, x: vec![] },
        ])
        .unwrap();
        let lik = WeibullPhLikelihood::new(&d, FeatureMap::Identity);
        let v = lik.value(&[0.0, 0.0]);
        assert!((v - libm::log(1.0 - libm::exp(-1.0))).abs() < 1e-14);
    }

    #[test]
    fn all_right_censored_rejected() {
        let d = Dataset::new(vec![IntervalObservation { l: 1.0, u: f64::INFINITY, x: vec![] }]).unwrap();
        assert!(weibull_ph_fit(&d, &WeibullOptions::default()).is_err());
    }

    #[test]
    fn wrong_init_length_rejected() {
        let opts = WeibullOptions { init: Some(vec![0.0]), ..Default::default() };
        assert!(weibull_ph_fit(&mixed_rows(), &opts).is_err());
    }

    #[test]
    fn fit_reaches_stationary_point() {
        let fit = weibull_ph_fit(&mixed_rows(), &WeibullOptions::default()).unwrap();
        assert!(fit.converged, "{fit:?}");
        assert!(fit.grad_norm < 1e-6);
    }
}
