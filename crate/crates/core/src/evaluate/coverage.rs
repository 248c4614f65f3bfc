//! Monte Carlo marginal coverage.

use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::evaluate::{replication_seed, Method};
use crate::math::{mean, sample_sd};
use crate::rng::{stream_rng, STREAM_EVAL};
use crate::simgen::{simulate, simulate_with, SimConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub method: String,
    pub alpha: f64,
    pub replications: usize,
    pub n: usize,
    pub n_test: usize,
    pub seed: u64,
    pub coverages: Vec<f64>,
    pub mean: f64,
    pub sd: f64,
    /// Monte Carlo standard error of `mean`.
    pub se: f64,
}

impl CoverageReport {
    pub fn from_coverages(method: String, alpha: f64, n: usize, n_test: usize, seed: u64, coverages: Vec<f64>) -> Self {
        let b = coverages.len();
        let m = mean(&coverages);
        let sd = sample_sd(&coverages);
        Self {
            method,
            alpha,
            replications: b,
            n,
            n_test,
            seed,
            se: sd / libm::sqrt(b.max(1) as f64),
            mean: m,
            sd,
            coverages,
        }
    }

    /// Mean of `|coverage - (1 - alpha)|` over replications.
    pub fn mean_abs_deviation(&self) -> f64 {
        let target = 1.0 - self.alpha;
        let d: Vec<f64> = self.coverages.iter().map(|c| libm::fabs(c - target)).collect();
        mean(&d)
    }
}

/// One replication: simulate `sim.n` training rows, fit the method, and
/// report the fraction of `n_test` fresh subjects whose latent time falls in
/// their prediction set.
pub fn coverage_replication(
    method: &Method,
    sim: &SimConfig,
    alpha: f64,
    n_test: usize,
    master_seed: u64,
    rep: usize,
) -> Result<f64> {
    if n_test == 0 {
        return Err(Error::InvalidConfig("n_test must be positive".into()));
    }
    let rep_seed = replication_seed(master_seed, rep);
    let mut train_cfg = sim.clone();
    train_cfg.seed = rep_seed;
    let train = simulate(&train_cfg)?;
    let fitted = method.fit(&train.dataset, alpha, rep_seed)?;

    let mut test_cfg = train_cfg;
    test_cfg.n = n_test;
    let mut rng = stream_rng(rep_seed, STREAM_EVAL, 0);
    let test = simulate_with(&test_cfg, &mut rng)?;
    let hits = test
        .dataset
        .observations()
        .iter()
        .zip(&test.true_times)
        .filter(|(o, t)| fitted.predict(&o.x).contains(**t))
        .count();
    Ok(hits as f64 / n_test as f64)
}

/// Sequential marginal-coverage experiment over `replications` runs.
pub fn marginal_coverage(
    method: &Method,
    sim: &SimConfig,
    alpha: f64,
    replications: usize,
    n_test: usize,
    seed: u64,
) -> Result<CoverageReport> {
    if replications == 0 {
        return Err(Error::InvalidConfig("need at least one replication".into()));
    }
    let coverages = (0..replications)
        .map(|rep| coverage_replication(method, sim, alpha, n_test, seed, rep))
        .collect::<Result<Vec<f64>>>()?;
    Ok(CoverageReport::from_coverages(method.label(), alpha, sim.n, n_test, seed, coverages))
}
