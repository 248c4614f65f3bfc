//! Monte Carlo check that the interval distribution of oracle scores is
//! centred on the uniform CDF.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::conformal::{border_scores, interval_distribution};
use crate::estimators::OracleModel;
use crate::evaluate::replication_seed;
use crate::math::{mean, sample_sd};
use crate::simgen::{simulate, SimConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnbiasednessReport {
    pub n: usize,
    pub replications: usize,
    pub seed: u64,
    pub grid: Vec<f64>,
    pub mean: Vec<f64>,
    pub se: Vec<f64>,
}

impl UnbiasednessReport {
    /// Aggregates per-replication curves evaluated on `grid`.
    pub fn from_curves(n: usize, seed: u64, grid: Vec<f64>, curves: &[Vec<f64>]) -> Self {
        let r = curves.len();
        let mut m = Vec::with_capacity(grid.len());
        let mut se = Vec::with_capacity(grid.len());
        for j in 0..grid.len() {
            let col: Vec<f64> = curves.iter().map(|c| c[j]).collect();
            m.push(mean(&col));
            se.push(sample_sd(&col) / libm::sqrt(r.max(1) as f64));
        }
        Self { n, replications: r, seed, grid, mean: m, se }
    }

    /// Largest `|mean(t) - t|` over the grid.
    pub fn max_abs_bias(&self) -> f64 {
        self.grid.iter().zip(&self.mean).map(|(t, m)| libm::fabs(m - t)).fold(0.0, f64::max)
    }

    /// Whether every grid point lies within `z` standard errors of `t`,
    /// with `floor` guarding grid points where the spread vanishes.
    pub fn within(&self, z: f64, floor: f64) -> bool {
        self.grid.iter().zip(&self.mean).zip(&self.se).all(|((t, m), s)| libm::fabs(m - t) <= z * s + floor)
    }
}

/// `I_n(t)` on `grid` from oracle scores of one simulated sample.
pub fn interval_distribution_replication(
    sim: &SimConfig,
    grid: &[f64],
    master_seed: u64,
    rep: usize,
) -> Result<Vec<f64>> {
    let mut cfg = sim.clone();
    cfg.seed = replication_seed(master_seed, rep);
    let out = simulate(&cfg)?;
    let oracle = OracleModel::from_sim(&cfg);
    let scores = border_scores(&oracle, &out.dataset)?;
    Ok(grid.iter().map(|t| interval_distribution(&scores, *t)).collect())
}

pub fn unbiasedness_check(sim: &SimConfig, grid: &[f64], replications: usize, seed: u64) -> Result<UnbiasednessReport> {
    if replications < 2 {
        return Err(Error::InvalidConfig("need at least two replications".into()));
    }
    let curves = (0..replications)
        .map(|rep| interval_distribution_replication(sim, grid, seed, rep))
        .collect::<Result<Vec<_>>>()?;
    Ok(UnbiasednessReport::from_curves(sim.n, seed, grid.to_vec(), &curves))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::linspace;
    use crate::simgen::Scenario;

    #[test]
    fn oracle_interval_distribution_is_nearly_uniform() {
        let sim = Scenario::AbsLink.config(200, 0);
        let grid = linspace(0.05, 0.95, 19);
        let r = unbiasedness_check(&sim, &grid, 40, 5).unwrap();
        assert!(r.within(4.0, 1e-3), "bias {}", r.max_abs_bias());
    }
}
