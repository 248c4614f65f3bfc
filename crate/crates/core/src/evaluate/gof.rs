//! Goodness of fit through uniformity of randomised interval scores.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::conformal::border_scores;
use crate::data::{make_split, Dataset};
use crate::estimators::{ConditionalCdf, EstimatorSpec};
use crate::evaluate::replication_seed;
use crate::math::{linspace, sort_f64};
use crate::rng::{derive_seed, CounterRng, STREAM_EVAL, STREAM_SPLIT};
use crate::simgen::{simulate, SimConfig};
use crate::{Error, Result};

const KOLMOGOROV_TERMS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GofReport {
    pub n: usize,
    pub seed: u64,
    /// Kolmogorov-Smirnov distance to the uniform law on `[0, 1]`.
    pub statistic: f64,
    pub p_value: f64,
    pub grid: Vec<f64>,
    pub ecdf: Vec<f64>,
}

/// `sup_t |F_n(t) - t|` for values in `[0, 1]`.
pub fn ks_statistic_uniform(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    sort_f64(&mut v);
    let n = v.len() as f64;
    v.iter().enumerate().fold(0.0f64, |d, (i, x)| {
        let above = (i + 1) as f64 / n - x;
        let below = x - i as f64 / n;
        d.max(above).max(below)
    })
}

/// Asymptotic `P(sqrt(n) D_n > lambda)` from the Kolmogorov series.
pub fn kolmogorov_pvalue(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut s = 0.0;
    for k in 1..=KOLMOGOROV_TERMS {
        let kf = k as f64;
        let term = libm::exp(-2.0 * kf * kf * lambda * lambda);
        s += if k % 2 == 1 { term } else { -term };
    }
    (2.0 * s).clamp(0.0, 1.0)
}

/// Draws one point uniformly inside each row's score interval.
pub fn randomized_scores<M: ConditionalCdf + ?Sized>(model: &M, data: &Dataset, seed: u64) -> Result<Vec<f64>> {
    let scores = border_scores(model, data)?;
    let draws = CounterRng::new(seed);
    Ok(scores
        .lambda
        .iter()
        .zip(&scores.upsilon)
        .enumerate()
        .map(|(i, (l, u))| (l + (u - l) * draws.open01(i as u64)).clamp(0.0, 1.0))
        .collect())
}

/// Kolmogorov-Smirnov test of the randomised scores against `U(0, 1)`.
pub fn gof_uniformity<M: ConditionalCdf + ?Sized>(model: &M, data: &Dataset, seed: u64) -> Result<GofReport> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut phi = randomized_scores(model, data, seed)?;
    let n = phi.len();
    let statistic = ks_statistic_uniform(&phi);
    let p_value = kolmogorov_pvalue(libm::sqrt(n as f64) * statistic);
    sort_f64(&mut phi);
    let grid = linspace(0.0, 1.0, 101);
    let ecdf = grid.iter().map(|t| phi.partition_point(|p| p <= t) as f64 / n as f64).collect();
    Ok(GofReport { n, seed, statistic, p_value, grid, ecdf })
}

/// One simulated goodness-of-fit test.
///
/// An oracle specification needs no training, so every simulated row is
/// tested; other estimators are fitted on the first part of a
/// `fit_fraction` split and tested on the rest.
pub fn gof_replication(
    estimator: &EstimatorSpec,
    sim: &SimConfig,
    fit_fraction: f64,
    master_seed: u64,
    rep: usize,
) -> Result<GofReport> {
    let rep_seed = replication_seed(master_seed, rep);
    let mut cfg = sim.clone();
    cfg.seed = rep_seed;
    let data = simulate(&cfg)?.dataset;
    let draw_seed = derive_seed(rep_seed, STREAM_EVAL, 0);
    if let EstimatorSpec::Oracle { .. } = estimator {
        let model = estimator.fit(&data)?;
        return gof_uniformity(&model, &data, draw_seed);
    }
    let split = make_split(data.len(), fit_fraction, derive_seed(rep_seed, STREAM_SPLIT, 0))?;
    let model = estimator.fit(&data.subset(&split.fit_indices)?)?;
    gof_uniformity(&model, &data.subset(&split.calibration_indices)?, draw_seed)
}
