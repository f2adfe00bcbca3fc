//! Adaptive Gauss-Kronrod quadrature for the moment integrals.

use crate::error::{Error, Result};

/// 15-point Kronrod abscissae on [-1, 1] (positive half).
const XGK: [f64; 8] = [
    0.991_455_371_120_813,
    0.949_107_912_342_759,
    0.864_864_423_359_769,
    0.741_531_185_599_394,
    0.586_087_235_467_691,
    0.405_845_151_377_397,
    0.207_784_955_007_898,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529,
    0.063_092_092_629_979,
    0.104_790_010_322_250,
    0.140_653_259_715_525,
    0.169_004_726_639_267,
    0.190_350_578_064_785,
    0.204_432_940_075_298,
    0.209_482_141_084_728,
];

/// Embedded 7-point Gauss weights (matching XGK indices 1, 3, 5, 7).
const WG: [f64; 4] = [
    0.129_484_966_168_870,
    0.279_705_391_489_277,
    0.381_830_050_505_119,
    0.417_959_183_673_469,
];

/// One G7/K15 pass over [a, b]: returns (kronrod, |kronrod - gauss|).
fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut kronrod = 0.0;
    let mut gauss = 0.0;
    for (i, (&x, &wk)) in XGK.iter().zip(WGK.iter()).enumerate() {
        let (fp, fm);
        if x == 0.0 {
            fp = f(mid);
            fm = 0.0;
            kronrod += wk * fp;
        } else {
            fp = f(mid + half * x);
            fm = f(mid - half * x);
            kronrod += wk * (fp + fm);
        }
        // Odd Kronrod indices carry the embedded Gauss nodes; the
        // midpoint (index 7) enters once since fm = 0 there.
        if i % 2 == 1 {
            gauss += WG[i / 2] * (fp + fm);
        }
    }
    (kronrod * half, (kronrod - gauss).abs() * half)
}

fn adaptive(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let (value, err) = gk15(f, a, b);
    if err <= tol * value.abs().max(1e-300) || err <= 1e-305 {
        return Ok(value);
    }
    if depth == 0 {
        return Err(Error::NoConvergence {
            what: "adaptive quadrature",
            iterations: 40,
        });
    }
    let mid = 0.5 * (a + b);
    Ok(adaptive(f, a, mid, tol, depth - 1)? + adaptive(f, mid, b, tol, depth - 1)?)
}

/// Integrates f over (0, inf) by doubling segments anchored at `scale`,
/// stopping once three consecutive segments contribute negligibly.
/// Errors with [`Error::DivergentIntegral`] if the tail never settles.
pub fn integrate_half_line(f: &dyn Fn(f64) -> f64, scale: f64, rel_tol: f64) -> Result<f64> {
    let scale = if scale.is_finite() && scale > 0.0 { scale } else { 1.0 };
    let mut total = adaptive(f, 0.0, scale, rel_tol, 40)?;
    let mut lo = scale;
    let mut hi = 2.0 * scale;
    let mut quiet = 0;
    for _ in 0..64 {
        let seg = adaptive(f, lo, hi, rel_tol, 40)?;
        total += seg;
        if seg.abs() <= rel_tol * total.abs().max(1e-300) {
            quiet += 1;
            if quiet >= 3 {
                return Ok(total);
            }
        } else {
            quiet = 0;
        }
        lo = hi;
        hi *= 2.0;
    }
    Err(Error::DivergentIntegral("half-line moment integral"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math;

    #[test]
    fn integrates_exponential_mean() {
        // int_0^inf x e^-x dx = 1.
        let f = |x: f64| x * math::exp(-x);
        let v = integrate_half_line(&f, 1.0, 1e-10).unwrap();
        assert!((v - 1.0).abs() < 1e-9);
    }

    #[test]
    fn integrates_sharp_peak() {
        // Normal density around 10, sd 0.05: total mass 1.
        let f = |x: f64| {
            let z = (x - 10.0) / 0.05;
            math::exp(-0.5 * z * z) / (0.05 * 2.506_628_274_631_000_5)
        };
        let v = integrate_half_line(&f, 1.0, 1e-10).unwrap();
        assert!((v - 1.0).abs() < 1e-8, "v={v}");
    }

    #[test]
    fn flags_divergence() {
        let f = |x: f64| 1.0 / (1.0 + x);
        assert!(matches!(
            integrate_half_line(&f, 1.0, 1e-10),
            Err(Error::DivergentIntegral(_))
        ));
    }
}
