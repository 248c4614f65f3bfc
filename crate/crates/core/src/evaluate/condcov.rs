//! Conditional coverage as a function of a scalar covariate.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::evaluate::smoother::{binned_rates, local_logistic_curve};
use crate::evaluate::{replication_seed, FittedMethod, Method};
use crate::math::{compensated_sum, interp, linspace, mean, sort_f64};
use crate::rng::{stream_rng, STREAM_EVAL};
use crate::simgen::{simulate, simulate_with, SimConfig, SimOutput};
use crate::{Error, Result};

pub const MIN_EVAL_POINTS: usize = 100;
pub const GRID_POINTS: usize = 201;
pub const CHECK_BINS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalCoverageCurve {
    pub alpha: f64,
    pub n_eval: usize,
    pub bandwidth: f64,
    pub grid: Vec<f64>,
    pub pi_hat: Vec<f64>,
    /// Root mean squared gap between the smoothed coverage at the evaluation
    /// points and `1 - alpha`.
    pub err: f64,
    /// The same error computed from 20 equal-width bin means.
    pub binned_err: f64,
    /// Raw fraction of evaluation subjects covered.
    pub marginal: f64,
}

/// Root mean squared gap to `1 - alpha`, summed in sorted order.
pub fn rms_gap(values: &[f64], alpha: f64) -> f64 {
    let target = 1.0 - alpha;
    let mut sq: Vec<f64> = values.iter().map(|p| (p - target) * (p - target)).collect();
    sort_f64(&mut sq);
    libm::sqrt(compensated_sum(sq) / values.len() as f64)
}

/// Smooths coverage indicators `covered` against scalar covariates `x`.
pub fn coverage_curve(x: &[f64], covered: &[bool], alpha: f64) -> Result<ConditionalCoverageCurve> {
    let n = x.len();
    if n < MIN_EVAL_POINTS {
        return Err(Error::InvalidConfig(alloc::format!(
            "conditional coverage needs at least {MIN_EVAL_POINTS} evaluation points, got {n}"
        )));
    }
    if covered.len() != n {
        return Err(Error::InvalidConfig("indicator and covariate lengths differ".into()));
    }
    let y: Vec<f64> = covered.iter().map(|c| if *c { 1.0 } else { 0.0 }).collect();
    let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let grid = linspace(lo, hi, GRID_POINTS);
    let (pi_hat, bandwidth) = local_logistic_curve(x, &y, &grid)?;
    if pi_hat.iter().any(|p| !p.is_finite()) {
        return Err(Error::NonFinite("smoothed coverage is not finite".into()));
    }
    let at_points: Vec<f64> = x.iter().map(|xi| interp(&grid, &pi_hat, *xi)).collect();
    let err = rms_gap(&at_points, alpha);

    let (_, rates) = binned_rates(x, &y, CHECK_BINS);
    let width = (hi - lo) / CHECK_BINS as f64;
    let binned: Vec<f64> =
        x.iter().map(|xi| rates[crate::evaluate::smoother::bin_of(*xi, lo, width, CHECK_BINS)]).collect();
    let binned_err = rms_gap(&binned, alpha);

    Ok(ConditionalCoverageCurve { alpha, n_eval: n, bandwidth, grid, pi_hat, err, binned_err, marginal: mean(&y) })
}

fn scalar_covariates(sim: &SimOutput) -> Result<Vec<f64>> {
    if sim.dataset.covariate_dim() != 1 {
        return Err(Error::InvalidConfig(alloc::format!(
            "conditional coverage needs a scalar covariate, got dimension {}",
            sim.dataset.covariate_dim()
        )));
    }
    Ok(sim.dataset.observations().iter().map(|o| o.x[0]).collect())
}

/// Draws `n_eval` fresh subjects from `sim` and smooths the coverage of a
/// fitted method.
pub fn conditional_coverage_curve(
    fitted: &FittedMethod,
    sim: &SimConfig,
    alpha: f64,
    n_eval: usize,
    seed: u64,
) -> Result<ConditionalCoverageCurve> {
    let eval = eval_sample(sim, n_eval, seed)?;
    curve_on(fitted, &eval, alpha)
}

fn eval_sample(sim: &SimConfig, n_eval: usize, seed: u64) -> Result<SimOutput> {
    let mut cfg = sim.clone();
    cfg.n = n_eval;
    let mut rng = stream_rng(seed, STREAM_EVAL, 1);
    simulate_with(&cfg, &mut rng)
}

fn curve_on(fitted: &FittedMethod, eval: &SimOutput, alpha: f64) -> Result<ConditionalCoverageCurve> {
    let x = scalar_covariates(eval)?;
    let covered: Vec<bool> = eval
        .dataset
        .observations()
        .iter()
        .zip(&eval.true_times)
        .map(|(o, t)| fitted.predict(&o.x).contains(*t))
        .collect();
    coverage_curve(&x, &covered, alpha)
}

/// One replication comparing several methods on the same training sample
/// and the same evaluation subjects; returns one curve per method.
pub fn condcov_replication(
    methods: &[Method],
    sim: &SimConfig,
    alpha: f64,
    n_eval: usize,
    master_seed: u64,
    rep: usize,
) -> Result<Vec<ConditionalCoverageCurve>> {
    let rep_seed = replication_seed(master_seed, rep);
    let mut train_cfg = sim.clone();
    train_cfg.seed = rep_seed;
    let train = simulate(&train_cfg)?;
    let eval = eval_sample(&train_cfg, n_eval, rep_seed)?;
    methods
        .iter()
        .map(|m| {
            let fitted = m.fit(&train.dataset, alpha, rep_seed)?;
            curve_on(&fitted, &eval, alpha)
        })
        .collect()
}
