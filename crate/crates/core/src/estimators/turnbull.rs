//! Turnbull's nonparametric MLE for interval-censored data.
//!
//! Observations are half-open windows `(l, u]` (points when `l == u`). The
//! NPMLE puts mass only on the maximal intersections: windows delimited by a
//! left endpoint immediately followed, in the endpoint order, by a right
//! endpoint. Masses are found by the self-consistency (EM) iteration
//!
//! ```text
//! m_j <- sum_i w_i * a_ij m_j / sum_k a_ik m_k
//! ```
//!
//! where `a_ij = 1` when support window `j` lies inside observation `i`. The
//! support windows are disjoint and sorted, so the windows inside an
//! observation form a contiguous index range and each iteration costs
//! `O(N + J)`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, IntervalObservation};
use crate::estimators::ConditionalCdf;
use crate::math::compensated_sum;
use crate::{Error, Result};

/// Threshold used when comparing step survival values with a level.
const STEP_EPS: f64 = 1e-12;

/// One support window. `left == right` is the point `{right}`; otherwise
/// the window is `(left, right]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupportInterval {
    pub left: f64,
    #[serde(with = "crate::serde_f64")]
    pub right: f64,
}

impl SupportInterval {
    pub fn is_point(&self) -> bool {
        self.left == self.right
    }
}

/// Position on the extended line: `open` marks `value + 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Key {
    value: f64,
    open: bool,
}

impl Key {
    fn cmp(&self, other: &Key) -> Ordering {
        self.value.partial_cmp(&other.value).expect("NaN endpoint").then((self.open as u8).cmp(&(other.open as u8)))
    }
}

fn obs_keys(o: &IntervalObservation) -> (Key, Key) {
    if o.is_exact() {
        let p = Key { value: o.u, open: false };
        (p, p)
    } else {
        (Key { value: o.l, open: true }, Key { value: o.u, open: false })
    }
}

fn support_left_key(s: &SupportInterval) -> Key {
    Key { value: s.left, open: !s.is_point() }
}

/// Support windows and, per observation, the index range of windows inside it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportStructure {
    pub supports: Vec<SupportInterval>,
    pub ranges: Vec<(usize, usize)>,
}

impl SupportStructure {
    pub fn build(rows: &[IntervalObservation]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyDataset);
        }
        // (key, is_right)
        let mut endpoints: Vec<(Key, bool)> = Vec::with_capacity(2 * rows.len());
        for o in rows {
            let (a, b) = obs_keys(o);
            endpoints.push((a, false));
            endpoints.push((b, true));
        }
        endpoints.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));

        let mut supports = Vec::new();
        for w in endpoints.windows(2) {
            let ((lk, l_is_right), (rk, r_is_right)) = (w[0], w[1]);
            if !l_is_right && r_is_right {
                let left = lk.value;
                let right = rk.value;
                if !lk.open && left != right {
                    return Err(Error::Invariant(format!("closed support window [{left}, {right}] is not a point")));
                }
                supports.push(SupportInterval { left, right });
            }
        }
        if supports.is_empty() {
            return Err(Error::Fit("no maximal intersection".into()));
        }

        let mut ranges = Vec::with_capacity(rows.len());
        for (row, o) in rows.iter().enumerate() {
            let (ok_l, ok_r) = obs_keys(o);
            let start = supports.partition_point(|s| support_left_key(s).cmp(&ok_l) == Ordering::Less);
            let end = supports.partition_point(|s| Key { value: s.right, open: false }.cmp(&ok_r) != Ordering::Greater);
            if start >= end {
                return Err(Error::Invariant(format!("observation {row} contains no support window")));
            }
            ranges.push((start, end));
        }
        Ok(Self { supports, ranges })
    }

    pub fn len(&self) -> usize {
        self.supports.len()
    }

    pub fn is_empty(&self) -> bool {
        self.supports.is_empty()
    }
}

/// Outcome of the EM iteration.
#[derive(Debug, Clone)]
pub struct EmOutcome {
    pub masses: Vec<f64>,
    pub iterations: usize,
    pub final_change: f64,
    pub converged: bool,
    /// `sum_i w_i log P_i` before the first and after every iteration.
    pub loglik_trace: Vec<f64>,
}

fn weighted_loglik(structure: &SupportStructure, weights: &[f64], prefix: &[f64]) -> f64 {
    compensated_sum(structure.ranges.iter().zip(weights).map(|(&(s, e), &w)| {
        if w == 0.0 {
            0.0
        } else {
            w * libm::log(prefix[e] - prefix[s])
        }
    }))
}

fn fill_prefix(masses: &[f64], prefix: &mut [f64]) {
    prefix[0] = 0.0;
    for (j, m) in masses.iter().enumerate() {
        prefix[j + 1] = prefix[j] + m;
    }
}

/// Self-consistency iteration with observation weights summing to one.
pub fn self_consistency(
    structure: &SupportStructure,
    weights: &[f64],
    init: Vec<f64>,
    tol: f64,
    max_iter: usize,
    record_trace: bool,
) -> EmOutcome {
    let j_count = structure.len();
    let mut masses = init;
    let mut prefix = vec![0.0; j_count + 1];
    let mut diff = vec![0.0; j_count + 1];
    let mut trace = Vec::new();
    fill_prefix(&masses, &mut prefix);
    if record_trace {
        trace.push(weighted_loglik(structure, weights, &prefix));
    }
    let mut change = f64::INFINITY;
    let mut iterations = 0;
    while iterations < max_iter {
        diff.iter_mut().for_each(|d| *d = 0.0);
        for (&(s, e), &w) in structure.ranges.iter().zip(weights) {
            if w == 0.0 {
                continue;
            }
            let denom = prefix[e] - prefix[s];
            let c = w / denom;
            diff[s] += c;
            diff[e] -= c;
        }
        let mut acc = 0.0;
        change = 0.0;
        let mut total = 0.0;
        for j in 0..j_count {
            acc += diff[j];
            let next = masses[j] * acc;
            masses[j] = next;
            total += next;
        }
        for j in 0..j_count {
            let next = masses[j] / total;
            change = f64::max(change, libm::fabs(next - prefix[j + 1] + prefix[j]));
            masses[j] = next;
        }
        fill_prefix(&masses, &mut prefix);
        iterations += 1;
        if record_trace {
            trace.push(weighted_loglik(structure, weights, &prefix));
        }
        if change < tol {
            break;
        }
    }
    EmOutcome { masses, iterations, final_change: change, converged: change < tol, loglik_trace: trace }
}

/// Covariate-free NPMLE of the event-time distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TurnbullFit {
    pub support_intervals: Vec<SupportInterval>,
    pub masses: Vec<f64>,
    pub iterations: usize,
    pub final_tolerance: f64,
    pub converged: bool,
    /// Total log-likelihood `sum_i log P_i` at the returned masses.
    pub loglik: f64,
    /// Total log-likelihood before the first and after each iteration.
    #[serde(skip)]
    pub loglik_trace: Vec<f64>,
    /// Cumulative masses, `cumulative[j] = m_0 + ... + m_{j-1}`.
    #[serde(skip)]
    cumulative: Vec<f64>,
}

impl TurnbullFit {
    pub fn from_masses(
        support_intervals: Vec<SupportInterval>,
        masses: Vec<f64>,
        iterations: usize,
        final_tolerance: f64,
        converged: bool,
        loglik: f64,
        loglik_trace: Vec<f64>,
    ) -> Self {
        let mut fit = Self {
            support_intervals,
            masses,
            iterations,
            final_tolerance,
            converged,
            loglik,
            loglik_trace,
            cumulative: Vec::new(),
        };
        fit.rebuild_cache();
        fit
    }

    /// Recomputes the cumulative-mass cache (needed after deserialisation).
    pub fn rebuild_cache(&mut self) {
        self.cumulative = cumulative(&self.masses);
    }

    fn cum(&self) -> alloc::borrow::Cow<'_, [f64]> {
        if self.cumulative.len() == self.masses.len() + 1 {
            alloc::borrow::Cow::Borrowed(&self.cumulative)
        } else {
            alloc::borrow::Cow::Owned(cumulative(&self.masses))
        }
    }
}

pub(crate) fn cumulative(masses: &[f64]) -> Vec<f64> {
    let mut c = Vec::with_capacity(masses.len() + 1);
    c.push(0.0);
    let mut acc = 0.0;
    for m in masses {
        acc += m;
        c.push(acc);
    }
    c
}

/// Right-continuous step CDF with each window's mass at its right endpoint.
pub(crate) fn step_cdf(supports: &[SupportInterval], cum: &[f64], t: f64) -> f64 {
    if t == f64::INFINITY {
        return 1.0;
    }
    let k = supports.partition_point(|s| s.right <= t);
    cum[k].min(1.0)
}

/// First right endpoint at which the step survival drops to `q` or below.
pub(crate) fn step_invert(supports: &[SupportInterval], cum: &[f64], q: f64, t_max: f64) -> f64 {
    if 1.0 <= q + STEP_EPS {
        return 0.0;
    }
    let total = cum[cum.len() - 1];
    for (j, s) in supports.iter().enumerate() {
        let surv = total - cum[j + 1];
        if surv <= q + STEP_EPS {
            return if s.right <= t_max { s.right } else { f64::INFINITY };
        }
    }
    f64::INFINITY
}

pub fn turnbull_fit(data: &Dataset, tol: f64, max_iter: usize) -> Result<TurnbullFit> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if data.observations().iter().all(|o| o.is_right_censored()) {
        return Err(Error::Fit("Turnbull fit needs at least one finite interval".into()));
    }
    let structure = SupportStructure::build(data.observations())?;
    let n = data.len();
    let weights = vec![1.0 / n as f64; n];
    let init = vec![1.0 / structure.len() as f64; structure.len()];
    let out = self_consistency(&structure, &weights, init, tol, max_iter, true);
    let scale = n as f64;
    let trace: Vec<f64> = out.loglik_trace.iter().map(|v| v * scale).collect();
    let loglik = *trace.last().expect("trace has the initial value");
    Ok(TurnbullFit::from_masses(
        structure.supports,
        out.masses,
        out.iterations,
        out.final_change,
        out.converged,
        loglik,
        trace,
    ))
}

impl ConditionalCdf for TurnbullFit {
    fn cdf(&self, t: f64, _x: &[f64]) -> f64 {
        step_cdf(&self.support_intervals, &self.cum(), t)
    }

    fn name(&self) -> &'static str {
        "turnbull"
    }

    fn invert_survival(&self, q: f64, _x: &[f64], t_max: f64) -> f64 {
        step_invert(&self.support_intervals, &self.cum(), q, t_max)
    }
}
