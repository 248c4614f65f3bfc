//! Small numeric helpers shared across modules.

use alloc::vec::Vec;

/// Neumaier-compensated sum; order-dependent only at the 1e-16 level.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if libm::fabs(sum) >= libm::fabs(v) {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    compensated_sum(values.iter().copied()) / values.len() as f64
}

/// Sample standard deviation (n - 1 denominator); zero for a single value.
pub fn sample_sd(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(values);
    let ss = compensated_sum(values.iter().map(|v| (v - m) * (v - m)));
    libm::sqrt(ss / (n - 1) as f64)
}

/// `log(1 - exp(-x))` for `x > 0`, accurate at both ends.
#[inline]
pub fn log1mexp(x: f64) -> f64 {
    if x > core::f64::consts::LN_2 {
        libm::log1p(-libm::exp(-x))
    } else {
        libm::log(-libm::expm1(-x))
    }
}

/// Sort a float vector ascending; NaN must not be present.
pub fn sort_f64(values: &mut [f64]) {
    values.sort_by(|a, b| a.partial_cmp(b).expect("NaN in sort"));
}

/// Linear interpolation on an increasing grid, flat outside it.
pub fn interp(grid: &[f64], values: &[f64], x: f64) -> f64 {
    debug_assert_eq!(grid.len(), values.len());
    let n = grid.len();
    if n == 0 {
        return f64::NAN;
    }
    if x <= grid[0] {
        return values[0];
    }
    if x >= grid[n - 1] {
        return values[n - 1];
    }
    let hi = grid.partition_point(|g| *g <= x);
    let lo = hi - 1;
    let w = (x - grid[lo]) / (grid[hi] - grid[lo]);
    values[lo] + w * (values[hi] - values[lo])
}

/// Equally spaced grid of `n >= 2` points on `[a, b]`.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return alloc::vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / core::f64::consts::SQRT_2)
}

/// Solves `a x = b` for a small dense row-major `n x n` system by Gaussian
/// elimination with partial pivoting. Returns `None` when singular.
pub fn solve_dense(a: &[f64], b: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut m = a.to_vec();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            libm::fabs(m[i * n + col]).partial_cmp(&libm::fabs(m[j * n + col])).unwrap_or(core::cmp::Ordering::Equal)
        })?;
        if !(libm::fabs(m[pivot * n + col]) > 1e-300) {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                m.swap(col * n + k, pivot * n + k);
            }
            rhs.swap(col, pivot);
        }
        for row in (col + 1)..n {
            let f = m[row * n + col] / m[col * n + col];
            if f != 0.0 {
                for k in col..n {
                    m[row * n + k] -= f * m[col * n + k];
                }
                rhs[row] -= f * rhs[col];
            }
        }
    }
    let mut x = alloc::vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for k in (row + 1)..n {
            acc -= m[row * n + k] * x[k];
        }
        x[row] = acc / m[row * n + row];
    }
    Some(x)
}

/// Inverse of a small dense row-major matrix, column by column.
pub fn invert_dense(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut inv = alloc::vec![0.0; n * n];
    let mut e = alloc::vec![0.0; n];
    for col in 0..n {
        e.iter_mut().for_each(|v| *v = 0.0);
        e[col] = 1.0;
        let x = solve_dense(a, &e, n)?;
        for row in 0..n {
            inv[row * n + col] = x[row];
        }
    }
    Some(inv)
}

pub fn norm2(v: &[f64]) -> f64 {
    libm::sqrt(v.iter().map(|x| x * x).sum::<f64>())
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_beats_naive() {
        let v = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(v), 2.0);
    }

    #[test]
    fn log1mexp_matches_direct_form() {
        for x in [1e-8, 1e-3, 0.5, 1.0, 5.0, 30.0] {
            let direct = libm::log1p(-libm::exp(-x));
            let rel = (log1mexp(x) - direct).abs() / direct.abs();
            assert!(rel < 1e-6, "x={x}");
        }
    }

    #[test]
    fn interp_is_piecewise_linear() {
        let g = [0.0, 1.0, 2.0];
        let v = [0.0, 10.0, 0.0];
        assert_eq!(interp(&g, &v, 0.5), 5.0);
        assert_eq!(interp(&g, &v, 1.5), 5.0);
        assert_eq!(interp(&g, &v, -1.0), 0.0);
        assert_eq!(interp(&g, &v, 3.0), 0.0);
    }

    #[test]
    fn dense_solve_and_inverse() {
        let a = [4.0, 1.0, 2.0, 3.0];
        let x = solve_dense(&a, &[1.0, 2.0], 2).unwrap();
        assert!((4.0 * x[0] + x[1] - 1.0).abs() < 1e-14);
        assert!((2.0 * x[0] + 3.0 * x[1] - 2.0).abs() < 1e-14);
        let inv = invert_dense(&a, 2).unwrap();
        assert!((inv[0] - 0.3).abs() < 1e-14 && (inv[3] - 0.4).abs() < 1e-14);
        assert!(solve_dense(&[1.0, 2.0, 2.0, 4.0], &[1.0, 1.0], 2).is_none());
    }

    #[test]
    fn sd_of_constant_is_zero() {
        assert_eq!(sample_sd(&[2.0, 2.0, 2.0]), 0.0);
        assert!((sample_sd(&[1.0, 2.0, 3.0]) - 1.0).abs() < 1e-15);
    }
}
