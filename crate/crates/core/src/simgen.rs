//! Interval-censored responses from a Weibull accelerated-failure-time model.
//!
//! Latent times solve `p log(sT) = -r(X) + H` with `H` a standard
//! minimum-Gumbel variate, so that `S(t | x) = exp(-(st)^p e^{r(x)})`.
//! Each subject is then inspected at epochs `0 < a_1 < ... < a_k` whose gaps
//! are i.i.d. `Uniform(0, inspect_length)`; the reported interval is the
//! inspection window `(a_{j-1}, a_j]` that contains the latent time, or
//! `(a_k, inf)` if the event happens after the last visit.

use alloc::format;
use alloc::vec::Vec;
use rand_core::RngCore;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, IntervalObservation};
use crate::link::Link;
use crate::math::normal_cdf;
use crate::rng::{standard_normal, uniform, uniform01};
use crate::{Error, Result};

/// Law of the covariate vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CovariateLaw {
    /// Each coordinate uniform on `[low, high]`; `rho > 0` couples the
    /// coordinates through an equicorrelated Gaussian copula.
    Uniform {
        low: f64,
        high: f64,
        dim: usize,
        #[serde(default)]
        rho: f64,
    },
}

impl CovariateLaw {
    pub fn dim(&self) -> usize {
        match self {
            CovariateLaw::Uniform { dim, .. } => *dim,
        }
    }

    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match *self {
            CovariateLaw::Uniform { low, high, dim, rho } => {
                if rho == 0.0 {
                    (0..dim).map(|_| uniform(rng, low, high)).collect()
                } else {
                    let common = standard_normal(rng);
                    let (a, b) = (libm::sqrt(rho), libm::sqrt(1.0 - rho));
                    (0..dim)
                        .map(|_| {
                            let z = a * common + b * standard_normal(rng);
                            low + (high - low) * normal_cdf(z)
                        })
                        .collect()
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub shape: f64,
    pub scale: f64,
    pub inspections: usize,
    pub inspect_length: f64,
    pub n: usize,
    pub covariates: CovariateLaw,
    pub link: Link,
    pub seed: u64,
    /// Scenario label only; generation is unchanged.
    #[serde(default)]
    pub no_left_censoring: bool,
}

/// Named simulation presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    /// `X ~ U(-2, 2)`, `r(X) = -0.3 |X|`, shape 2, scale 1, 10 inspections.
    AbsLink,
    /// `X ~ U(0, 2)`, `r(X) = X`, shape 2, scale 1, 5 inspections;
    /// roughly 30% right-censored.
    LinearLink,
}

impl Scenario {
    pub fn config(self, n: usize, seed: u64) -> SimConfig {
        match self {
            Scenario::AbsLink => SimConfig {
                shape: 2.0,
                scale: 1.0,
                inspections: 10,
                inspect_length: 0.5,
                n,
                covariates: CovariateLaw::Uniform { low: -2.0, high: 2.0, dim: 1, rho: 0.0 },
                link: Link::AbsLinear { coefs: alloc::vec![-0.3] },
                seed,
                no_left_censoring: false,
            },
            Scenario::LinearLink => SimConfig {
                shape: 2.0,
                scale: 1.0,
                inspections: 5,
                inspect_length: 0.285,
                n,
                covariates: CovariateLaw::Uniform { low: 0.0, high: 2.0, dim: 1, rho: 0.0 },
                link: Link::Linear { coefs: alloc::vec![1.0] },
                seed,
                no_left_censoring: true,
            },
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: alloc::string::String| Err(Error::InvalidConfig(m));
        if !(self.shape > 0.0 && self.shape.is_finite()) {
            return bad(format!("shape must be positive, got {}", self.shape));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return bad(format!("scale must be positive, got {}", self.scale));
        }
        if self.inspections == 0 {
            return bad("inspections must be at least 1".into());
        }
        if !(self.inspect_length > 0.0 && self.inspect_length.is_finite()) {
            return bad(format!("inspect_length must be positive, got {}", self.inspect_length));
        }
        let CovariateLaw::Uniform { low, high, rho, .. } = self.covariates;
        if !(low.is_finite() && high.is_finite() && low <= high) {
            return bad(format!("covariate range [{low}, {high}] is invalid"));
        }
        if !(0.0..1.0).contains(&rho) {
            return bad(format!("covariate correlation must lie in [0, 1), got {rho}"));
        }
        if self.link.min_dim() > self.covariates.dim() {
            return bad(format!(
                "link needs {} covariates, law provides {}",
                self.link.min_dim(),
                self.covariates.dim()
            ));
        }
        Ok(())
    }

    /// True conditional survival `exp(-(st)^p e^{r(x)})`.
    pub fn survival(&self, t: f64, x: &[f64]) -> f64 {
        weibull_ph_survival(t, self.shape, self.scale, self.link.eval(x))
    }
}

/// `exp(-(s t)^p e^{eta})`, with `S(inf) = 0`.
pub fn weibull_ph_survival(t: f64, shape: f64, scale: f64, eta: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    if t == f64::INFINITY {
        return 0.0;
    }
    libm::exp(-libm::exp(shape * libm::log(scale * t) + eta))
}

/// Minimum-Gumbel variate by inverse transform, `H = log(-log(1 - V))`.
#[inline]
pub fn gumbel_min_from_uniform(v: f64) -> f64 {
    libm::log(-libm::log1p(-v))
}

/// Solves `p log(sT) = -r + H` for `T`.
#[inline]
pub fn aft_time(shape: f64, scale: f64, r: f64, h: f64) -> f64 {
    libm::exp((h - r) / shape) / scale
}

/// Censoring category of a simulated row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CensorKind {
    Left,
    Interval,
    Right,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimOutput {
    pub dataset: Dataset,
    pub true_times: Vec<f64>,
    pub censoring: Vec<CensorKind>,
}

pub fn draw_covariates<R: RngCore + ?Sized>(config: &SimConfig, rng: &mut R) -> Vec<Vec<f64>> {
    (0..config.n).map(|_| config.covariates.sample(rng)).collect()
}

pub fn draw_true_times<R: RngCore + ?Sized>(config: &SimConfig, xs: &[Vec<f64>], rng: &mut R) -> Vec<f64> {
    xs.iter()
        .map(|x| {
            let h = gumbel_min_from_uniform(uniform01(rng));
            aft_time(config.shape, config.scale, config.link.eval(x), h)
        })
        .collect()
}

/// The inspection window `(a_{j-1}, a_j]` (with `a_0 = 0`) containing `t`,
/// or `(a_k, inf)` past the last epoch.
pub fn censor_with_epochs(t: f64, epochs: &[f64]) -> (f64, f64, CensorKind) {
    let mut prev = 0.0;
    for (j, &a) in epochs.iter().enumerate() {
        if t <= a {
            let kind = if j == 0 { CensorKind::Left } else { CensorKind::Interval };
            return (prev, a, kind);
        }
        prev = a;
    }
    (prev, f64::INFINITY, CensorKind::Right)
}

pub fn draw_epochs<R: RngCore + ?Sized>(config: &SimConfig, rng: &mut R, out: &mut Vec<f64>) {
    out.clear();
    let mut a = 0.0;
    for _ in 0..config.inspections {
        let mut gap = uniform(rng, 0.0, config.inspect_length);
        // keep epochs strictly increasing
        if gap <= 0.0 {
            gap = f64::MIN_POSITIVE;
        }
        a += gap;
        out.push(a);
    }
}

pub fn inspect_censor<R: RngCore + ?Sized>(
    times: &[f64],
    xs: &[Vec<f64>],
    config: &SimConfig,
    rng: &mut R,
) -> Result<(Dataset, Vec<CensorKind>)> {
    let mut epochs = Vec::with_capacity(config.inspections);
    let mut rows = Vec::with_capacity(times.len());
    let mut kinds = Vec::with_capacity(times.len());
    for (t, x) in times.iter().zip(xs) {
        draw_epochs(config, rng, &mut epochs);
        let (l, u, kind) = censor_with_epochs(*t, &epochs);
        rows.push(IntervalObservation { l, u, x: x.clone() });
        kinds.push(kind);
    }
    Ok((Dataset::with_dim(rows, config.covariates.dim())?, kinds))
}

/// Covariates, latent times and inspection intervals, seeded by `config.seed`.
pub fn simulate(config: &SimConfig) -> Result<SimOutput> {
    let mut rng = crate::rng::stream_rng(config.seed, crate::rng::STREAM_SIM, 0);
    simulate_with(config, &mut rng)
}

pub fn simulate_with<R: RngCore + ?Sized>(config: &SimConfig, rng: &mut R) -> Result<SimOutput> {
    config.validate()?;
    let xs = draw_covariates(config, rng);
    let true_times = draw_true_times(config, &xs, rng);
    let (dataset, censoring) = inspect_censor(&true_times, &xs, config, rng)?;
    Ok(SimOutput { dataset, true_times, censoring })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn inverse_map_identity() {
        assert_eq!(aft_time(1.0, 1.0, 0.0, 0.0), 1.0);
    }

    #[test]
    fn gumbel_inverse_transform_matches_cdf() {
        // P(H <= h) = 1 - exp(-exp(h)) for the minimum-Gumbel law.
        for v in [0.1, 0.5, 0.9] {
            let h = gumbel_min_from_uniform(v);
            assert!((1.0 - libm::exp(-libm::exp(h)) - v).abs() < 1e-14);
        }
    }

    #[test]
    fn epoch_rules() {
        assert_eq!(censor_with_epochs(0.05, &[0.1, 0.4]), (0.0, 0.1, CensorKind::Left));
        assert_eq!(censor_with_epochs(99.0, &[0.3, 1.0]), (1.0, f64::INFINITY, CensorKind::Right));
        assert_eq!(censor_with_epochs(0.35, &[0.2, 0.5, 0.9]), (0.2, 0.5, CensorKind::Interval));
        // An event exactly at an epoch closes the window ending there.
        assert_eq!(censor_with_epochs(0.5, &[0.2, 0.5, 0.9]), (0.2, 0.5, CensorKind::Interval));
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut c = Scenario::AbsLink.config(10, 1);
        c.shape = 0.0;
        assert!(c.validate().is_err());
        let mut c = Scenario::AbsLink.config(10, 1);
        c.inspections = 0;
        assert!(c.validate().is_err());
        let mut c = Scenario::AbsLink.config(10, 1);
        c.link = Link::Linear { coefs: vec![1.0, 1.0] };
        assert!(c.validate().is_err());
    }

    #[test]
    fn correlated_uniforms_stay_in_range() {
        let law = CovariateLaw::Uniform { low: -1.0, high: 1.0, dim: 3, rho: 0.5 };
        let mut rng = crate::rng::stream_rng(5, "t", 0);
        for _ in 0..1000 {
            let x = law.sample(&mut rng);
            assert!(x.iter().all(|v| (-1.0..=1.0).contains(v)));
        }
    }
}
