//! Nelder-Mead simplex minimization with the standard Lagarias
//! coefficients. Deterministic: no randomized restarts, ties broken by
//! vertex index.

use alloc::vec;
use alloc::vec::Vec;

pub struct SimplexResult {
    pub x: Vec<f64>,
    pub fx: f64,
    pub evaluations: u64,
    /// Max vertex distance from the best vertex at termination.
    pub diameter: f64,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

pub fn nelder_mead(
    f: &mut dyn FnMut(&[f64]) -> f64,
    x0: &[f64],
    step: f64,
    max_evaluations: u64,
    f_tol: f64,
    diameter_tol: f64,
) -> SimplexResult {
    let dim = x0.len();
    let mut evals: u64 = 0;
    let eval = |f: &mut dyn FnMut(&[f64]) -> f64, x: &[f64], evals: &mut u64| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut verts: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    verts.push(x0.to_vec());
    for i in 0..dim {
        let mut v = x0.to_vec();
        v[i] += step;
        verts.push(v);
    }
    let mut fvals: Vec<f64> = verts
        .iter()
        .map(|v| eval(f, v, &mut evals))
        .collect();

    loop {
        // Order vertices by objective, stable in index.
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&i, &j| fvals[i].total_cmp(&fvals[j]).then(i.cmp(&j)));
        let best = order[0];
        let worst = order[dim];
        let second_worst = order[dim.saturating_sub(1).max(0)];

        let diameter = verts
            .iter()
            .map(|v| dist(v, &verts[best]))
            .fold(0.0f64, f64::max);
        let spread = fvals[worst] - fvals[best];
        let done = (spread.abs() <= f_tol * (1.0 + fvals[best].abs()) && diameter <= diameter_tol)
            || evals >= max_evaluations
            || !fvals[best].is_finite();
        if done {
            return SimplexResult {
                x: verts[best].clone(),
                fx: fvals[best],
                evaluations: evals,
                diameter,
            };
        }

        // Centroid of all but the worst vertex.
        let mut centroid = vec![0.0; dim];
        for (i, v) in verts.iter().enumerate() {
            if i == worst {
                continue;
            }
            for (c, &vi) in centroid.iter_mut().zip(v.iter()) {
                *c += vi;
            }
        }
        for c in centroid.iter_mut() {
            *c /= dim as f64;
        }

        let blend = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(verts[worst].iter())
                .map(|(&c, &w)| c + t * (c - w))
                .collect()
        };

        let xr = blend(REFLECT);
        let fr = eval(f, &xr, &mut evals);
        if fr < fvals[best] {
            let xe = blend(EXPAND);
            let fe = eval(f, &xe, &mut evals);
            if fe < fr {
                verts[worst] = xe;
                fvals[worst] = fe;
            } else {
                verts[worst] = xr;
                fvals[worst] = fr;
            }
        } else if fr < fvals[second_worst] {
            verts[worst] = xr;
            fvals[worst] = fr;
        } else {
            let (xc, fc) = if fr < fvals[worst] {
                let xc = blend(CONTRACT);
                let fc = eval(f, &xc, &mut evals);
                (xc, fc)
            } else {
                let xc = blend(-CONTRACT);
                let fc = eval(f, &xc, &mut evals);
                (xc, fc)
            };
            if fc < fvals[worst].min(fr) {
                verts[worst] = xc;
                fvals[worst] = fc;
            } else {
                // Shrink toward the best vertex.
                let anchor = verts[best].clone();
                for (i, v) in verts.iter_mut().enumerate() {
                    if i == best {
                        continue;
                    }
                    for (vi, &ai) in v.iter_mut().zip(anchor.iter()) {
                        *vi = ai + SHRINK * (*vi - ai);
                    }
                    fvals[i] = eval(f, v, &mut evals);
                }
            }
        }
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for (&x, &y) in a.iter().zip(b.iter()) {
        s += (x - y) * (x - y);
    }
    libm::sqrt(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_rosenbrock() {
        let mut f = |x: &[f64]| {
            let (a, b) = (x[0], x[1]);
            (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2)
        };
        let r = nelder_mead(&mut f, &[-1.2, 1.0], 0.5, 20_000, 1e-12, 1e-8);
        assert!((r.x[0] - 1.0).abs() < 1e-4, "{:?}", r.x);
        assert!((r.x[1] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn one_dimensional_quadratic() {
        let mut f = |x: &[f64]| (x[0] - 3.5) * (x[0] - 3.5);
        let r = nelder_mead(&mut f, &[0.0], 0.25, 5_000, 1e-14, 1e-10);
        assert!((r.x[0] - 3.5).abs() < 1e-6);
    }

    #[test]
    fn survives_infinite_plateau() {
        // Objective infinite left of 1; minimum at 2.
        let mut f = |x: &[f64]| {
            if x[0] < 1.0 {
                f64::INFINITY
            } else {
                (x[0] - 2.0) * (x[0] - 2.0)
            }
        };
        let r = nelder_mead(&mut f, &[1.25], 0.5, 5_000, 1e-14, 1e-10);
        assert!((r.x[0] - 2.0).abs() < 1e-5);
    }
}
