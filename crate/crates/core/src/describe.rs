//! Descriptive statistics: moments, shape measures, and empirical
//! percentiles.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::sample::Sample;
use crate::sum::CompensatedSum;

/// Summary of one sample, mirroring the usual report row.
///
/// `variance` is the unbiased 1/(n-1) estimator; `skewness` and
/// `kurtosis` use 1/n central moments (kurtosis is *not* excess: the
/// normal distribution scores 3).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Descriptives {
    pub n: usize,
    pub min: f64,
    pub max: f64,
    pub median: f64,
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub kurtosis: f64,
    pub p95: f64,
    pub p99: f64,
}

/// Linear-interpolation order-statistic quantile with plotting position
/// (i - 1)/(n - 1) (the "type 7" convention, R's default) over
/// already-sorted data.
pub fn empirical_quantile(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    if sorted.len() == 1 {
        return sorted[0];
    }
    let h = p.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = math::floor(h) as usize;
    if lo + 1 >= sorted.len() {
        return sorted[sorted.len() - 1];
    }
    let frac = h - lo as f64;
    sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
}

/// Computes the descriptive record; requires n >= 2 and nonzero variance
/// (the shape measures are undefined otherwise).
pub fn describe(sample: &Sample) -> Result<Descriptives> {
    let values = sample.values();
    let n = values.len();
    if n < 2 {
        return Err(Error::Domain("describe requires at least 2 observations"));
    }
    let nf = n as f64;

    let mut mean_acc = CompensatedSum::new();
    for &v in values {
        mean_acc.add(v);
    }
    let mean = mean_acc.value() / nf;

    // Central moments in a second pass, compensated.
    let (mut m2, mut m3, mut m4) = (
        CompensatedSum::new(),
        CompensatedSum::new(),
        CompensatedSum::new(),
    );
    for &v in values {
        let d = v - mean;
        let d2 = d * d;
        m2.add(d2);
        m3.add(d2 * d);
        m4.add(d2 * d2);
    }
    let m2n = m2.value() / nf;
    if m2n == 0.0 {
        return Err(Error::Degenerate("zero variance"));
    }
    let skewness = (m3.value() / nf) / math::powf(m2n, 1.5);
    let kurtosis = (m4.value() / nf) / (m2n * m2n);
    let variance = m2.value() / (nf - 1.0);

    let sorted = sample.sorted();
    Ok(Descriptives {
        n,
        min: sorted[0],
        max: sorted[n - 1],
        median: empirical_quantile(&sorted, 0.5),
        mean,
        variance,
        skewness,
        kurtosis,
        p95: empirical_quantile(&sorted, 0.95),
        p99: empirical_quantile(&sorted, 0.99),
    })
}

/// Convenience for already-sorted borrowed data (used by the GoF layer).
pub fn sorted_copy(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn sample(values: &[f64]) -> Sample {
        Sample::new(values.to_vec()).unwrap()
    }

    #[test]
    fn symmetric_three_points() {
        let d = describe(&sample(&[1.0, 2.0, 3.0])).unwrap();
        assert_eq!(d.n, 3);
        assert_eq!(d.median, 2.0);
        assert_eq!(d.mean, 2.0);
        assert!((d.skewness).abs() < 1e-14);
        // 1/n moments: m4/m2^2 = (2/3)/(4/9) = 1.5.
        assert!((d.kurtosis - 1.5).abs() < 1e-14);
        // Unbiased variance: 1.
        assert!((d.variance - 1.0).abs() < 1e-14);
    }

    #[test]
    fn degenerate_and_too_small() {
        assert!(matches!(
            describe(&sample(&[5.0, 5.0, 5.0])),
            Err(Error::Degenerate(_))
        ));
        assert!(describe(&sample(&[5.0])).is_err());
    }

    #[test]
    fn quantile_type7_interpolates() {
        let sorted = vec![1.0, 2.0, 3.0, 4.0];
        // h = 0.95 * 3 = 2.85 -> between the 3rd and 4th order statistics.
        assert!((empirical_quantile(&sorted, 0.95) - 3.85).abs() < 1e-14);
        assert_eq!(empirical_quantile(&sorted, 0.0), 1.0);
        assert_eq!(empirical_quantile(&sorted, 1.0), 4.0);
        assert_eq!(empirical_quantile(&[7.0], 0.3), 7.0);
    }

    #[test]
    fn reflection_negates_skewness() {
        let xs = [0.4, 1.1, 1.9, 2.2, 5.5, 9.1];
        let d1 = describe(&sample(&xs)).unwrap();
        let mean = d1.mean;
        // Reflect about the mean; shift to stay positive.
        let shift = 100.0;
        let reflected: Vec<f64> = xs.iter().map(|v| 2.0 * mean - v + shift).collect();
        let d2 = describe(&Sample::new(reflected).unwrap()).unwrap();
        assert!((d1.skewness + d2.skewness).abs() < 1e-10);
        assert!((d1.kurtosis - d2.kurtosis).abs() < 1e-10);
    }
}
