//! Replication runner on a dedicated rayon pool.
//!
//! Each replication is a pure function of its index, and results are
//! gathered in index order, so output never depends on the thread count.

use rayon::prelude::*;
use uncervals_core::evaluate::condcov::condcov_replication;
use uncervals_core::evaluate::coverage::coverage_replication;
use uncervals_core::evaluate::gof::gof_replication;
use uncervals_core::evaluate::unbiased::interval_distribution_replication;
use uncervals_core::evaluate::{ConditionalCoverageCurve, CoverageReport, GofReport, Method, UnbiasednessReport};
use uncervals_core::{EstimatorSpec, SimConfig};

use crate::error::{CliError, Result};

/// Runs `f(0..reps)` on `threads` workers (all cores when `None` or 0).
///
/// The first error in index order is returned.
pub fn replicate<T, F>(reps: usize, threads: Option<usize>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> uncervals_core::Result<T> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    let results: Vec<uncervals_core::Result<T>> = pool.install(|| (0..reps).into_par_iter().map(&f).collect());
    results.into_iter().map(|r| r.map_err(CliError::from)).collect()
}

pub fn marginal_coverage(
    method: &Method,
    sim: &SimConfig,
    alpha: f64,
    replications: usize,
    n_test: usize,
    seed: u64,
    threads: Option<usize>,
) -> Result<CoverageReport> {
    if replications == 0 {
        return Err(CliError::Usage("need at least one replication".into()));
    }
    let coverages =
        replicate(replications, threads, |rep| coverage_replication(method, sim, alpha, n_test, seed, rep))?;
    Ok(CoverageReport::from_coverages(method.label(), alpha, sim.n, n_test, seed, coverages))
}

/// Per replication, one curve per method (same data for every method).
pub fn conditional_coverage(
    methods: &[Method],
    sim: &SimConfig,
    alpha: f64,
    n_eval: usize,
    replications: usize,
    seed: u64,
    threads: Option<usize>,
) -> Result<Vec<Vec<ConditionalCoverageCurve>>> {
    replicate(replications, threads, |rep| condcov_replication(methods, sim, alpha, n_eval, seed, rep))
}

pub fn gof(
    estimator: &EstimatorSpec,
    sim: &SimConfig,
    fit_fraction: f64,
    replications: usize,
    seed: u64,
    threads: Option<usize>,
) -> Result<Vec<GofReport>> {
    replicate(replications, threads, |rep| gof_replication(estimator, sim, fit_fraction, seed, rep))
}

pub fn unbiasedness(
    sim: &SimConfig,
    grid: &[f64],
    replications: usize,
    seed: u64,
    threads: Option<usize>,
) -> Result<UnbiasednessReport> {
    if replications < 2 {
        return Err(CliError::Usage("need at least two replications".into()));
    }
    let curves = replicate(replications, threads, |rep| interval_distribution_replication(sim, grid, seed, rep))?;
    Ok(UnbiasednessReport::from_curves(sim.n, seed, grid.to_vec(), &curves))
}
