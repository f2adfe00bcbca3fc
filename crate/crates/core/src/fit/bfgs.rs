//! Dense BFGS with Armijo backtracking, sized for the 1-4 parameter
//! problems here. The inverse Hessian estimate is stored as a flat
//! row-major matrix.

use alloc::vec;
use alloc::vec::Vec;

pub struct BfgsResult {
    pub x: Vec<f64>,
    pub fx: f64,
    pub grad_norm: f64,
    pub evaluations: u64,
    pub converged: bool,
}

const ARMIJO_C1: f64 = 1e-4;
const MAX_BACKTRACKS: u32 = 40;

/// Minimizes f from x0. `grad` returns `None` when the gradient cannot be
/// evaluated, which terminates the iteration at the current point.
pub fn bfgs(
    f: &mut dyn FnMut(&[f64]) -> f64,
    grad: &mut dyn FnMut(&[f64]) -> Option<Vec<f64>>,
    x0: &[f64],
    grad_tol: f64,
    max_iterations: u32,
) -> BfgsResult {
    let dim = x0.len();
    let mut evals: u64 = 0;
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    evals += 1;

    let result = |x: Vec<f64>, fx: f64, gnorm: f64, evals: u64, conv: bool| BfgsResult {
        x,
        fx,
        grad_norm: gnorm,
        evaluations: evals,
        converged: conv,
    };

    if !fx.is_finite() {
        return result(x, fx, f64::INFINITY, evals, false);
    }

    let mut h = identity(dim);
    let mut g = match grad(&x) {
        Some(g) => g,
        None => return result(x, fx, f64::INFINITY, evals, false),
    };

    for _ in 0..max_iterations {
        let gnorm = norm(&g);
        if gnorm <= grad_tol {
            return result(x, fx, gnorm, evals, true);
        }

        let mut dir = neg_mat_vec(&h, &g);
        if dot(&dir, &g) >= 0.0 {
            // Lost positive definiteness; restart from steepest descent.
            h = identity(dim);
            dir = g.iter().map(|v| -v).collect();
        }

        // Backtracking line search with the Armijo condition.
        let slope = dot(&dir, &g);
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let cand: Vec<f64> = x.iter().zip(dir.iter()).map(|(&xi, &di)| xi + t * di).collect();
            let fc = f(&cand);
            evals += 1;
            if fc.is_finite() && fc <= fx + ARMIJO_C1 * t * slope {
                accepted = Some((cand, fc));
                break;
            }
            t *= 0.5;
        }
        let (x_new, f_new) = match accepted {
            Some(v) => v,
            None => return result(x, fx, gnorm, evals, gnorm <= grad_tol),
        };

        let g_new = match grad(&x_new) {
            Some(g) => g,
            None => return result(x_new, f_new, f64::INFINITY, evals, false),
        };

        let s: Vec<f64> = x_new.iter().zip(x.iter()).map(|(&a, &b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(g.iter()).map(|(&a, &b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * norm(&s) * norm(&y) {
            bfgs_update(&mut h, &s, &y, sy);
        }

        x = x_new;
        fx = f_new;
        g = g_new;
    }
    let gnorm = norm(&g);
    result(x, fx, gnorm, evals, gnorm <= grad_tol)
}

fn identity(dim: usize) -> Vec<f64> {
    let mut m = vec![0.0; dim * dim];
    for i in 0..dim {
        m[i * dim + i] = 1.0;
    }
    m
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(&x, &y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

fn neg_mat_vec(m: &[f64], v: &[f64]) -> Vec<f64> {
    let dim = v.len();
    (0..dim)
        .map(|i| -(0..dim).map(|j| m[i * dim + j] * v[j]).sum::<f64>())
        .collect()
}

/// H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T with rho = 1/s'y.
fn bfgs_update(h: &mut [f64], s: &[f64], y: &[f64], sy: f64) {
    let dim = s.len();
    let rho = 1.0 / sy;
    let hy: Vec<f64> = (0..dim)
        .map(|i| (0..dim).map(|j| h[i * dim + j] * y[j]).sum::<f64>())
        .collect();
    let yhy = dot(y, &hy);
    for i in 0..dim {
        for j in 0..dim {
            h[i * dim + j] += rho * rho * yhy * s[i] * s[j] + rho * s[i] * s[j]
                - rho * (hy[i] * s[j] + s[i] * hy[j]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad_grad(x: &[f64]) -> Option<Vec<f64>> {
        Some(vec![2.0 * (x[0] - 1.0), 8.0 * (x[1] + 2.0)])
    }

    #[test]
    fn minimizes_quadratic() {
        let mut f = |x: &[f64]| (x[0] - 1.0).powi(2) + 4.0 * (x[1] + 2.0).powi(2);
        let mut g = quad_grad;
        let r = bfgs(&mut f, &mut g, &[5.0, 5.0], 1e-10, 200);
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-8);
        assert!((r.x[1] + 2.0).abs() < 1e-8);
    }

    #[test]
    fn rosenbrock_with_fd_gradient() {
        let rosen = |x: &[f64]| {
            (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)
        };
        let mut f = rosen;
        let mut g = move |x: &[f64]| {
            let h = 1e-7;
            let mut out = vec![0.0; x.len()];
            for i in 0..x.len() {
                let mut xp = x.to_vec();
                let mut xm = x.to_vec();
                xp[i] += h;
                xm[i] -= h;
                out[i] = (rosen(&xp) - rosen(&xm)) / (2.0 * h);
            }
            Some(out)
        };
        let r = bfgs(&mut f, &mut g, &[-1.2, 1.0], 1e-6, 500);
        assert!((r.x[0] - 1.0).abs() < 1e-4, "{:?}", r.x);
        assert!((r.x[1] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn stops_on_infinite_start() {
        let mut f = |_: &[f64]| f64::INFINITY;
        let mut g = |_: &[f64]| Some(vec![0.0]);
        let r = bfgs(&mut f, &mut g, &[1.0], 1e-8, 50);
        assert!(!r.converged);
    }
}
