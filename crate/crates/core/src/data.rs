//! Interval observations, datasets and seeded splits.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::rng::{u64_to_index, CounterRng};
use crate::{Error, Result};

/// Relative width below which an interval counts as an exact observation.
pub const EXACT_TOLERANCE: f64 = 1e-12;

/// `true` when `u - l <= 1e-12 * max(1, u)`.
#[inline]
pub fn endpoints_coincide(l: f64, u: f64) -> bool {
    u.is_finite() && u - l <= EXACT_TOLERANCE * u.max(1.0)
}

/// One subject: the event time is known to lie in `(l, u]`.
///
/// `u = +inf` encodes right-censoring, `l = 0` with finite `u` left-censoring
/// and `l == u` an exactly observed time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalObservation {
    pub l: f64,
    #[serde(with = "crate::serde_f64")]
    pub u: f64,
    pub x: Vec<f64>,
}

impl IntervalObservation {
    pub fn new(l: f64, u: f64, x: Vec<f64>) -> Result<Self> {
        let obs = Self { l, u, x };
        obs.validate(0)?;
        Ok(obs)
    }

    pub fn validate(&self, row: usize) -> Result<()> {
        let bad = |reason: &str| Error::InvalidObservation { row, reason: reason.to_string() };
        if !self.l.is_finite() || self.l < 0.0 {
            return Err(bad("lower endpoint must be finite and nonnegative"));
        }
        if self.u.is_nan() {
            return Err(bad("upper endpoint is NaN"));
        }
        if self.l > self.u {
            return Err(Error::InvalidObservation { row, reason: format!("l > u ({} > {})", self.l, self.u) });
        }
        if self.u <= 0.0 {
            return Err(bad("upper endpoint must be positive"));
        }
        if self.x.iter().any(|v| !v.is_finite()) {
            return Err(bad("covariates must be finite"));
        }
        Ok(())
    }

    pub fn is_right_censored(&self) -> bool {
        self.u == f64::INFINITY
    }

    pub fn is_left_censored(&self) -> bool {
        self.l == 0.0 && self.u.is_finite()
    }

    pub fn is_exact(&self) -> bool {
        endpoints_coincide(self.l, self.u)
    }
}

/// Immutable collection of observations sharing one covariate dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    observations: Vec<IntervalObservation>,
    covariate_dim: usize,
}

impl Dataset {
    /// Validates every row; the covariate dimension is taken from the first row.
    pub fn new(observations: Vec<IntervalObservation>) -> Result<Self> {
        let covariate_dim = observations.first().map_or(0, |o| o.x.len());
        Self::with_dim(observations, covariate_dim)
    }

    pub fn with_dim(observations: Vec<IntervalObservation>, covariate_dim: usize) -> Result<Self> {
        for (row, obs) in observations.iter().enumerate() {
            if obs.x.len() != covariate_dim {
                return Err(Error::DimensionMismatch { row, expected: covariate_dim, found: obs.x.len() });
            }
            obs.validate(row)?;
        }
        Ok(Self { observations, covariate_dim })
    }

    pub fn observations(&self) -> &[IntervalObservation] {
        &self.observations
    }

    pub fn covariate_dim(&self) -> usize {
        self.covariate_dim
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<&IntervalObservation> {
        self.observations.get(i)
    }

    /// Rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Result<Dataset> {
        let mut rows = Vec::with_capacity(indices.len());
        for &i in indices {
            let obs = self
                .observations
                .get(i)
                .ok_or_else(|| Error::InvalidSplit(format!("index {i} out of range for {} rows", self.len())))?;
            rows.push(obs.clone());
        }
        Ok(Dataset { observations: rows, covariate_dim: self.covariate_dim })
    }

    /// Largest finite endpoint (0 for an empty or fully right-censored-at-0 set).
    pub fn max_finite_endpoint(&self) -> f64 {
        self.observations.iter().flat_map(|o| [o.l, o.u]).filter(|v| v.is_finite()).fold(0.0, f64::max)
    }

    pub fn right_censored_fraction(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        let k = self.observations.iter().filter(|o| o.is_right_censored()).count();
        k as f64 / self.len() as f64
    }

    pub fn into_observations(self) -> Vec<IntervalObservation> {
        self.observations
    }
}

/// Disjoint fit/calibration index sets (0-based) covering `0..n_total`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub fit_indices: Vec<usize>,
    pub calibration_indices: Vec<usize>,
    pub seed: u64,
}

impl SplitPlan {
    pub fn n_total(&self) -> usize {
        self.fit_indices.len() + self.calibration_indices.len()
    }
}

/// Seeded random partition; `round(fit_fraction * n_total)` rows go to fitting.
pub fn make_split(n_total: usize, fit_fraction: f64, seed: u64) -> Result<SplitPlan> {
    if n_total < 4 {
        return Err(Error::InvalidSplit(format!("need at least 4 observations, got {n_total}")));
    }
    if !(fit_fraction > 0.0 && fit_fraction < 1.0) {
        return Err(Error::InvalidSplit(format!("fit fraction must lie in (0, 1), got {fit_fraction}")));
    }
    let n_fit = libm::round(fit_fraction * n_total as f64) as usize;
    if n_fit == 0 || n_fit >= n_total {
        return Err(Error::InvalidSplit(format!("fraction {fit_fraction} of {n_total} leaves an empty part")));
    }
    let mut perm: Vec<usize> = (0..n_total).collect();
    let g = CounterRng::new(seed);
    for i in (1..n_total).rev() {
        let j = u64_to_index(g.bits(i as u64), i + 1);
        perm.swap(i, j);
    }
    let mut fit_indices = perm[..n_fit].to_vec();
    let mut calibration_indices = perm[n_fit..].to_vec();
    fit_indices.sort_unstable();
    calibration_indices.sort_unstable();
    Ok(SplitPlan { fit_indices, calibration_indices, seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn rejects_reversed_interval() {
        let err = IntervalObservation::new(0.9, 0.4, vec![0.0]).unwrap_err();
        assert!(matches!(err, Error::InvalidObservation { .. }));
    }

    #[test]
    fn censoring_kinds() {
        let rc = IntervalObservation::new(1.3, f64::INFINITY, vec![0.0]).unwrap();
        assert!(rc.is_right_censored() && !rc.is_left_censored());
        let lc = IntervalObservation::new(0.0, 0.1, vec![]).unwrap();
        assert!(lc.is_left_censored());
        let ex = IntervalObservation::new(1.0, 1.0 + 1e-13, vec![]).unwrap();
        assert!(ex.is_exact());
        let iv = IntervalObservation::new(1.0, 1.0 + 1e-9, vec![]).unwrap();
        assert!(!iv.is_exact());
    }

    #[test]
    fn dimension_mismatch_is_reported_with_row() {
        let rows = vec![
            IntervalObservation { l: 0.0, u: 1.0, x: vec![1.0] },
            IntervalObservation { l: 0.0, u: 1.0, x: vec![1.0, 2.0] },
        ];
        assert_eq!(Dataset::new(rows).unwrap_err(), Error::DimensionMismatch { row: 1, expected: 1, found: 2 });
    }

    #[test]
    fn split_partitions_and_is_deterministic() {
        let a = make_split(10, 0.5, 7).unwrap();
        let b = make_split(10, 0.5, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.fit_indices.len(), 5);
        assert_eq!(a.calibration_indices.len(), 5);
        let mut all: Vec<usize> = a.fit_indices.iter().chain(&a.calibration_indices).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn split_is_not_a_prefix() {
        let a = make_split(100, 0.5, 3).unwrap();
        assert_ne!(a.fit_indices, (0..50).collect::<Vec<_>>());
    }

    #[test]
    fn degenerate_splits_fail() {
        assert!(make_split(3, 0.9, 1).is_err());
        assert!(make_split(10, 0.99, 1).is_err());
        assert!(make_split(10, 0.01, 1).is_err());
        assert!(make_split(10, 1.0, 1).is_err());
    }
}
