//! BFGS minimiser with a backtracking (Armijo) line search.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::{dot, norm2};

#[derive(Debug, Clone, Copy)]
pub struct BfgsOptions {
    /// Stop when the gradient norm falls below this value.
    pub grad_tol: f64,
    pub max_iter: usize,
}

#[derive(Debug, Clone)]
pub struct BfgsResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

const ARMIJO_C1: f64 = 1e-4;
const MAX_HALVINGS: usize = 80;

/// Minimises `f`. The closure writes the gradient into its second argument
/// and returns the value; non-finite values are treated as +inf.
pub fn minimize<F>(mut f: F, x0: &[f64], opts: &BfgsOptions) -> BfgsResult
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut g = vec![0.0; n];
    let mut fx = f(&x, &mut g);
    // inverse Hessian approximation, row-major
    let mut h = identity(n);
    let mut scaled = false;

    let mut x_new = vec![0.0; n];
    let mut g_new = vec![0.0; n];
    let mut dir = vec![0.0; n];
    let mut iterations = 0;
    let mut reset_once = false;

    if !fx.is_finite() {
        return BfgsResult { grad_norm: f64::INFINITY, x, value: fx, iterations, converged: false };
    }

    while iterations < opts.max_iter {
        let gnorm = norm2(&g);
        if gnorm < opts.grad_tol {
            return BfgsResult { x, value: fx, grad_norm: gnorm, iterations, converged: true };
        }
        iterations += 1;

        mat_vec(&h, &g, &mut dir);
        dir.iter_mut().for_each(|d| *d = -*d);
        let mut slope = dot(&g, &dir);
        if !(slope < 0.0) {
            h = identity(n);
            scaled = false;
            dir.iter_mut().zip(&g).for_each(|(d, gi)| *d = -gi);
            slope = -gnorm * gnorm;
        }
        // keep the very first unscaled step modest
        let mut step = if scaled { 1.0 } else { (1.0 / gnorm).min(1.0) };

        let mut accepted = false;
        let mut f_new = f64::INFINITY;
        for _ in 0..MAX_HALVINGS {
            for i in 0..n {
                x_new[i] = x[i] + step * dir[i];
            }
            f_new = f(&x_new, &mut g_new);
            if f_new.is_finite() && f_new <= fx + ARMIJO_C1 * step * slope {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            if !reset_once {
                // retry once along steepest descent with a fresh curvature model
                reset_once = true;
                h = identity(n);
                scaled = false;
                continue;
            }
            break;
        }
        if f_new < fx {
            reset_once = false;
        }

        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * norm2(&s) * norm2(&y) && sy > 0.0 {
            if !scaled {
                let gamma = sy / dot(&y, &y);
                h.iter_mut().for_each(|v| *v *= gamma);
                scaled = true;
            }
            bfgs_update(&mut h, &s, &y, sy);
        }
        x.copy_from_slice(&x_new);
        g.copy_from_slice(&g_new);
        fx = f_new;
    }
    let grad_norm = norm2(&g);
    BfgsResult { converged: grad_norm < opts.grad_tol, x, value: fx, grad_norm, iterations }
}

fn identity(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    m
}

fn mat_vec(m: &[f64], v: &[f64], out: &mut [f64]) {
    let n = v.len();
    for i in 0..n {
        out[i] = dot(&m[i * n..(i + 1) * n], v);
    }
}

/// `H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T`.
fn bfgs_update(h: &mut [f64], s: &[f64], y: &[f64], sy: f64) {
    let n = s.len();
    let rho = 1.0 / sy;
    let mut hy = vec![0.0; n];
    mat_vec(h, y, &mut hy);
    let yhy = dot(y, &hy);
    for i in 0..n {
        for j in 0..n {
            h[i * n + j] += -rho * (s[i] * hy[j] + hy[i] * s[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
        }
    }
}
