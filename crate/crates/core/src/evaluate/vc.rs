//! Shattering search for the class `{ l <= t < u, t - l > c }` indexed by `t`.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::math::sort_f64;
use crate::rng::{stream_rng, uniform, STREAM_EVAL};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VcPoint {
    pub l: f64,
    pub u: f64,
    pub c: f64,
}

impl VcPoint {
    pub fn included(&self, t: f64) -> bool {
        self.l <= t && t < self.u && (t - self.l) > self.c
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VcReport {
    pub points: usize,
    pub trials: usize,
    pub seed: u64,
    pub max_dichotomies: usize,
    pub shattered: bool,
    pub witness: Vec<VcPoint>,
}

/// Distinct inclusion patterns realised as `t` ranges over the real line.
///
/// Membership only changes at the breakpoints `l`, `u` and `l + c`, so the
/// breakpoints, the midpoints between them and one value beyond each end
/// reach every pattern.
pub fn dichotomies(points: &[VcPoint]) -> usize {
    assert!(points.len() <= 63, "too many points");
    let mut cuts: Vec<f64> = points.iter().flat_map(|p| [p.l, p.u, p.l + p.c]).filter(|v| v.is_finite()).collect();
    sort_f64(&mut cuts);
    cuts.dedup();
    let mut probes = Vec::with_capacity(2 * cuts.len() + 2);
    if let (Some(first), Some(last)) = (cuts.first(), cuts.last()) {
        probes.push(first - 1.0);
        probes.push(last + 1.0);
    } else {
        probes.push(0.0);
    }
    for w in cuts.windows(2) {
        probes.push(0.5 * (w[0] + w[1]));
    }
    probes.extend_from_slice(&cuts);
    let mut patterns: Vec<u64> = probes
        .iter()
        .map(|t| points.iter().enumerate().fold(0u64, |m, (j, p)| if p.included(*t) { m | (1 << j) } else { m }))
        .collect();
    patterns.sort_unstable();
    patterns.dedup();
    patterns.len()
}

/// Random search for a configuration of `k` points with the most patterns.
pub fn vc_shatter_search(k: usize, trials: usize, seed: u64) -> VcReport {
    let mut rng = stream_rng(seed, STREAM_EVAL, k as u64);
    let mut best = 0usize;
    let mut witness = Vec::new();
    let target = 1usize << k;
    for _ in 0..trials {
        let pts: Vec<VcPoint> = (0..k)
            .map(|_| {
                let l = uniform(&mut rng, 0.0, 1.0);
                let u = l + uniform(&mut rng, 0.0, 1.0);
                let c = uniform(&mut rng, -0.25, 1.0);
                VcPoint { l, u, c }
            })
            .collect();
        let d = dichotomies(&pts);
        if d > best {
            best = d;
            witness = pts;
            if best == target {
                break;
            }
        }
    }
    VcReport { points: k, trials, seed, max_dichotomies: best, shattered: best == target, witness }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn two_points_can_be_shattered() {
        let pts = vec![VcPoint { l: 0.0, u: 2.0, c: -1.0 }, VcPoint { l: 1.0, u: 4.0, c: -1.0 }];
        assert_eq!(dichotomies(&pts), 4);
    }

    #[test]
    fn negative_offset_means_plain_interval() {
        let p = VcPoint { l: 1.0, u: 2.0, c: -0.5 };
        assert!(p.included(1.0));
        assert!(p.included(1.999));
        assert!(!p.included(2.0));
        assert!(!p.included(0.999));
    }

    #[test]
    fn search_finds_four_but_never_eight() {
        let two = vc_shatter_search(2, 2_000, 1);
        assert!(two.shattered);
        let three = vc_shatter_search(3, 5_000, 1);
        assert!(!three.shattered);
        assert!(three.max_dichotomies <= 7);
    }
}
