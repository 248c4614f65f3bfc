//! Scatterplot smoothers for binary coverage indicators.

use alloc::vec::Vec;

use crate::math::{compensated_sum, sample_sd, sort_f64};
use crate::{Error, Result};

const WINDOW: f64 = 6.0;
const MAX_NEWTON: usize = 50;
const COEF_BOUND: f64 = 30.0;

/// Type-7 sample quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 0 {
        return f64::NAN;
    }
    let h = (n - 1) as f64 * p;
    let lo = libm::floor(h) as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// `0.9 min(sd, IQR / 1.34) n^{-1/5}`.
pub fn silverman_bandwidth(x: &[f64]) -> Result<f64> {
    let n = x.len();
    if n < 2 {
        return Err(Error::InvalidConfig("bandwidth needs at least two points".into()));
    }
    let mut sorted = x.to_vec();
    sort_f64(&mut sorted);
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
    let sd = sample_sd(x);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    let h = 0.9 * spread * libm::pow(n as f64, -0.2);
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::NonFinite(alloc::format!("degenerate smoothing bandwidth {h}")));
    }
    Ok(h)
}

fn sigmoid(eta: f64) -> f64 {
    if eta >= 0.0 {
        1.0 / (1.0 + libm::exp(-eta))
    } else {
        let e = libm::exp(eta);
        e / (1.0 + e)
    }
}

/// Gaussian-kernel local-linear logistic fit evaluated at `x0`.
///
/// `xs` must be sorted ascending; points beyond six bandwidths are ignored.
/// A tiny ridge keeps the fit finite when every nearby indicator agrees.
pub fn local_logistic_at(xs: &[f64], ys: &[f64], h: f64, x0: f64) -> f64 {
    let start = xs.partition_point(|x| *x < x0 - WINDOW * h);
    let end = xs.partition_point(|x| *x <= x0 + WINDOW * h);
    if start >= end {
        return f64::NAN;
    }
    let mut w = Vec::with_capacity(end - start);
    let mut z = Vec::with_capacity(end - start);
    for x in &xs[start..end] {
        let d = (x - x0) / h;
        z.push(d);
        w.push(libm::exp(-0.5 * d * d));
    }
    let y = &ys[start..end];
    let total_w = compensated_sum(w.iter().copied());
    let ridge = 1e-6 * total_w;

    let ybar = compensated_sum(w.iter().zip(y).map(|(w, y)| w * y)) / total_w;
    let p0 = ybar.clamp(0.01, 0.99);
    let (mut a, mut b) = (libm::log(p0 / (1.0 - p0)), 0.0);
    for _ in 0..MAX_NEWTON {
        let (mut g0, mut g1, mut h00, mut h01, mut h11) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for i in 0..w.len() {
            let p = sigmoid(a + b * z[i]);
            let r = w[i] * (y[i] - p);
            let v = w[i] * p * (1.0 - p);
            g0 += r;
            g1 += r * z[i];
            h00 += v;
            h01 += v * z[i];
            h11 += v * z[i] * z[i];
        }
        g0 -= ridge * a;
        g1 -= ridge * b;
        h00 += ridge;
        h11 += ridge;
        let det = h00 * h11 - h01 * h01;
        if !(det > 0.0) {
            break;
        }
        let da = (h11 * g0 - h01 * g1) / det;
        let db = (h00 * g1 - h01 * g0) / det;
        a = (a + da).clamp(-COEF_BOUND, COEF_BOUND);
        b = (b + db).clamp(-COEF_BOUND, COEF_BOUND);
        if libm::fabs(da) + libm::fabs(db) < 1e-10 {
            break;
        }
    }
    sigmoid(a)
}

/// Pairs sorted by `x`, then `y`, so that results do not depend on input order.
pub fn sorted_pairs(x: &[f64], y: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut pairs: Vec<(f64, f64)> = x.iter().copied().zip(y.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.partial_cmp(&b.1).unwrap()));
    pairs.into_iter().unzip()
}

/// Local-logistic curve on `grid` with the Silverman bandwidth of `x`.
pub fn local_logistic_curve(x: &[f64], y: &[f64], grid: &[f64]) -> Result<(Vec<f64>, f64)> {
    if x.len() != y.len() {
        return Err(Error::InvalidConfig("smoother inputs differ in length".into()));
    }
    let h = silverman_bandwidth(x)?;
    let (xs, ys) = sorted_pairs(x, y);
    let curve = grid.iter().map(|g| local_logistic_at(&xs, &ys, h, *g)).collect();
    Ok((curve, h))
}

/// Equal-width bin means over `[min x, max x]`; empty bins are `NaN`.
pub fn binned_rates(x: &[f64], y: &[f64], bins: usize) -> (Vec<f64>, Vec<f64>) {
    let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = (hi - lo) / bins as f64;
    let mut sums = alloc::vec![0.0; bins];
    let mut counts = alloc::vec![0usize; bins];
    for (xi, yi) in x.iter().zip(y) {
        let k = bin_of(*xi, lo, width, bins);
        sums[k] += yi;
        counts[k] += 1;
    }
    let centers = (0..bins).map(|k| lo + (k as f64 + 0.5) * width).collect();
    let rates = sums.iter().zip(&counts).map(|(s, c)| if *c == 0 { f64::NAN } else { s / *c as f64 }).collect();
    (centers, rates)
}

pub(crate) fn bin_of(x: f64, lo: f64, width: f64, bins: usize) -> usize {
    if !(width > 0.0) {
        return 0;
    }
    (libm::floor((x - lo) / width) as usize).min(bins - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::linspace;
    use alloc::vec;

    #[test]
    fn bandwidth_matches_hand_computation() {
        let x: Vec<f64> = (0..=10).map(|i| i as f64).collect();
        let sd = sample_sd(&x);
        let iqr: f64 = 7.5 - 2.5;
        let expected = 0.9 * sd.min(iqr / 1.34) * libm::pow(11.0, -0.2);
        assert!((silverman_bandwidth(&x).unwrap() - expected).abs() < 1e-14);
        assert!(silverman_bandwidth(&[1.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn constant_indicators_give_flat_curve() {
        let x = linspace(0.0, 1.0, 200);
        let y = vec![1.0; 200];
        let (curve, _) = local_logistic_curve(&x, &y, &[0.0, 0.5, 1.0]).unwrap();
        assert!(curve.iter().all(|p| *p > 0.999));
    }

    #[test]
    fn recovers_a_step_in_probability() {
        let x = linspace(0.0, 1.0, 2001);
        let y: Vec<f64> = x
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let p = if *v < 0.5 { 0.2 } else { 0.8 };
                // deterministic pattern with frequency p inside every block of ten
                if ((i % 10) as f64) < p * 10.0 {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        let (curve, _) = local_logistic_curve(&x, &y, &[0.1, 0.9]).unwrap();
        assert!((curve[0] - 0.2).abs() < 0.05);
        assert!((curve[1] - 0.8).abs() < 0.05);
    }

    #[test]
    fn binned_rates_average_within_bins() {
        let x = [0.0, 0.1, 0.9, 1.0];
        let y = [1.0, 0.0, 1.0, 1.0];
        let (centers, rates) = binned_rates(&x, &y, 2);
        assert_eq!(centers, vec![0.25, 0.75]);
        assert_eq!(rates, vec![0.5, 1.0]);
    }
}
