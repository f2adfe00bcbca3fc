//! Safeguarded scalar root finding: Newton steps confined to a bracket,
//! falling back to bisection whenever Newton misbehaves.

use crate::error::{Error, Result};

pub struct RootProblem<'a> {
    /// f(x); must be monotone nondecreasing on the bracket with
    /// f(lo) <= 0 <= f(hi).
    pub f: &'a dyn Fn(f64) -> f64,
    /// Derivative of f, or `None` for pure bisection.
    pub df: Option<&'a dyn Fn(f64) -> f64>,
    pub lo: f64,
    pub hi: f64,
    /// Stop when |f(x)| <= f_tol.
    pub f_tol: f64,
    /// Also stop when the bracket shrinks below
    /// x_tol_rel * |x| + x_tol_abs.
    pub x_tol_rel: f64,
    pub x_tol_abs: f64,
    pub max_iterations: u32,
    pub what: &'static str,
}

/// Finds x in [lo, hi] with f(x) ~ 0 for a monotone nondecreasing f.
pub fn solve_monotone(p: RootProblem<'_>) -> Result<f64> {
    let (mut lo, mut hi) = (p.lo, p.hi);
    let flo = (p.f)(lo);
    let fhi = (p.f)(hi);
    if flo > 0.0 || fhi < 0.0 {
        if flo.abs() <= p.f_tol {
            return Ok(lo);
        }
        if fhi.abs() <= p.f_tol {
            return Ok(hi);
        }
        return Err(Error::BracketFailure(p.what));
    }

    let mut x = 0.5 * (lo + hi);
    for _ in 0..p.max_iterations {
        let fx = (p.f)(x);
        if fx.abs() <= p.f_tol {
            return Ok(x);
        }
        if fx > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        if hi - lo <= p.x_tol_rel * x.abs() + p.x_tol_abs {
            return Ok(0.5 * (lo + hi));
        }

        let mut next = f64::NAN;
        if let Some(df) = p.df {
            let d = df(x);
            if d.is_finite() && d > 0.0 {
                let step = fx / d;
                let cand = x - step;
                if cand.is_finite() && cand > lo && cand < hi {
                    next = cand;
                }
            }
        }
        x = if next.is_finite() { next } else { 0.5 * (lo + hi) };
    }
    Err(Error::NoConvergence {
        what: p.what,
        iterations: p.max_iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_cube_root() {
        let f = |x: f64| x * x * x - 2.0;
        let df = |x: f64| 3.0 * x * x;
        let x = solve_monotone(RootProblem {
            f: &f,
            df: Some(&df),
            lo: 0.0,
            hi: 2.0,
            f_tol: 1e-14,
            x_tol_rel: 1e-15,
            x_tol_abs: 0.0,
            max_iterations: 100,
            what: "cube root",
        })
        .unwrap();
        assert!((x - 2f64.powf(1.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn bisection_only_converges() {
        let f = |x: f64| if x < 1.0 { -1.0 } else { 1.0 };
        let x = solve_monotone(RootProblem {
            f: &f,
            df: None,
            lo: 0.0,
            hi: 3.0,
            f_tol: 0.0,
            x_tol_rel: 1e-12,
            x_tol_abs: 1e-12,
            max_iterations: 200,
            what: "step",
        })
        .unwrap();
        assert!((x - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_bracket() {
        let f = |x: f64| x + 10.0;
        let err = solve_monotone(RootProblem {
            f: &f,
            df: None,
            lo: 0.0,
            hi: 1.0,
            f_tol: 1e-12,
            x_tol_rel: 1e-12,
            x_tol_abs: 0.0,
            max_iterations: 50,
            what: "bad bracket",
        })
        .unwrap_err();
        assert!(matches!(err, Error::BracketFailure(_)));
    }
}
