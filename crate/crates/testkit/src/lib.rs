//! Independent numerical oracles for the windfit test suites.
//!
//! Everything here deliberately avoids the algorithms used by the
//! production crates: integration is tanh-sinh or adaptive Simpson
//! (the library uses Gauss-Kronrod), special values come from series
//! definitions, and empirical statistics are brute-force. A test that
//! compares a library result against an oracle from this crate is
//! checking two genuinely different routes to the same number.

/// Tanh-sinh (double-exponential) quadrature on a finite interval.
///
/// Converges exponentially even with algebraic endpoint singularities
/// such as x^(alpha-1) near 0, which several of the densities under test
/// exhibit for shape < 1.
pub fn tanh_sinh(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut previous = f64::NAN;
    // Level k: step h = 2^-k over t, abscissae x = mid + half*tanh(pi/2 sinh(t)).
    let mut total = 0.0;
    for level in 1..=12u32 {
        let h = 0.5f64.powi(level as i32);
        let mut sum = 0.0;
        // At each level only odd multiples of h are new, but recomputing
        // everything keeps this oracle dead simple.
        let t_max = 4.0;
        let steps = (t_max / h) as i64;
        for j in -steps..=steps {
            let t = j as f64 * h;
            let u = core::f64::consts::FRAC_PI_2 * t.sinh();
            let w = core::f64::consts::FRAC_PI_2 * t.cosh() / u.cosh().powi(2);
            let x = mid + half * u.tanh();
            if x <= a || x >= b {
                continue;
            }
            let fx = f(x);
            if fx.is_finite() {
                sum += w * fx;
            }
        }
        total = sum * h * half;
        if !previous.is_nan() && (total - previous).abs() <= rel_tol * total.abs().max(1e-300) {
            return total;
        }
        previous = total;
    }
    total
}

/// Recursive adaptive Simpson quadrature on [a, b].
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1)
            + recurse(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1)
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 48)
}

/// Integral of t^(a-1) (1-t)^(b-1) over [0, 1] with the endpoint
/// singularities removed by the substitutions t = u^(1/a) on the left
/// half and 1 - t = u^(1/b) on the right half. An oracle for the beta
/// function that never touches a gamma implementation.
pub fn beta_integral(a: f64, b: f64) -> f64 {
    // Left: int_0^(1/2) t^(a-1)(1-t)^(b-1) dt = (1/a) int_0^(2^-a) (1-u^(1/a))^(b-1) du.
    let left_limit = 0.5f64.powf(a);
    let left = adaptive_simpson(
        &|u: f64| (1.0 - u.powf(1.0 / a)).powf(b - 1.0),
        0.0,
        left_limit,
        1e-13 * left_limit.max(1e-30),
    ) / a;
    let right_limit = 0.5f64.powf(b);
    let right = adaptive_simpson(
        &|u: f64| (1.0 - u.powf(1.0 / b)).powf(a - 1.0),
        0.0,
        right_limit,
        1e-13 * right_limit.max(1e-30),
    ) / b;
    left + right
}

/// Digamma by its series definition psi(x) = -gamma + sum_k (1/(k+1) - 1/(k+x)),
/// accelerated with the recurrence to keep the series short.
pub fn digamma_series(mut x: f64) -> f64 {
    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
    let mut shift = 0.0;
    while x < 40.0 {
        shift -= 1.0 / x;
        x += 1.0;
    }
    // At x >= 40 the tail sum converges quickly; run it directly.
    let mut sum = -EULER_GAMMA;
    let mut k = 0.0f64;
    loop {
        let term = 1.0 / (k + 1.0) - 1.0 / (k + x);
        sum += term;
        k += 1.0;
        if k > 1e7 {
            break;
        }
        if term.abs() < 1e-16 && k > x {
            break;
        }
    }
    sum + shift
}

/// Brute-force KS: max over a dense evaluation of both one-sided gaps at
/// every order statistic.
pub fn brute_force_ks(sorted: &[f64], cdf: &dyn Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    let mut sup: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        sup = sup.max(((i as f64 + 1.0) / n - f).abs());
        sup = sup.max((f - i as f64 / n).abs());
    }
    sup
}

/// Anderson-Darling via direct numerical integration of
/// n int (F_n - F)^2 / (F (1 - F)) dF, evaluated in probability space
/// where F_n jumps at p_i = F(x_(i)).
pub fn ad_by_quadrature(sorted: &[f64], cdf: &dyn Fn(f64) -> f64) -> f64 {
    let n = sorted.len();
    let nf = n as f64;
    let mut ps: Vec<f64> = sorted.iter().map(|&x| cdf(x)).collect();
    ps.sort_by(f64::total_cmp);
    // On (p_k, p_{k+1}) the empirical CDF equals k/n; integrate
    // (k/n - p)^2 / (p(1-p)) dp segment by segment.
    let mut total = 0.0;
    let mut edges = vec![0.0];
    edges.extend_from_slice(&ps);
    edges.push(1.0);
    for k in 0..=n {
        let (lo, hi) = (edges[k], edges[k + 1]);
        if hi <= lo {
            continue;
        }
        let fn_val = k as f64 / nf;
        let integrand = move |p: f64| {
            let d = fn_val - p;
            d * d / (p * (1.0 - p))
        };
        // The integrand is smooth inside each open segment; tanh-sinh
        // handles the endpoints where p(1-p) -> 0.
        total += tanh_sinh(&integrand, lo, hi, 1e-11);
    }
    nf * total
}

/// Central finite difference with a relative step.
pub fn central_difference(f: &dyn Fn(f64) -> f64, x: f64, scale: f64) -> f64 {
    let h = 1e-6 * x.abs().max(1.0) * scale;
    (f(x + h) - f(x - h)) / (2.0 * h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tanh_sinh_handles_singularity() {
        // int_0^1 x^(-1/2) dx = 2.
        let v = tanh_sinh(&|x: f64| x.powf(-0.5), 0.0, 1.0, 1e-12);
        assert!((v - 2.0).abs() < 1e-10, "v={v}");
    }

    #[test]
    fn simpson_matches_polynomial() {
        let v = adaptive_simpson(&|x: f64| 3.0 * x * x, 0.0, 2.0, 1e-12);
        assert!((v - 8.0).abs() < 1e-10);
    }

    #[test]
    fn beta_integral_known_value() {
        // B(2, 3) = 1/12.
        let v = beta_integral(2.0, 3.0);
        assert!((v - 1.0 / 12.0).abs() < 1e-10, "v={v}");
        // Symmetric case B(0.5, 0.5) = pi.
        let w = beta_integral(0.5, 0.5);
        assert!((w - core::f64::consts::PI).abs() < 1e-9, "w={w}");
    }

    #[test]
    fn digamma_series_known_values() {
        assert!((digamma_series(1.0) + 0.577_215_664_901_532_9).abs() < 1e-10);
        assert!((digamma_series(2.0) - 0.422_784_335_098_467_1).abs() < 1e-10);
    }
}
