//! Goodness-of-fit metrics: Kolmogorov-Smirnov, Anderson-Darling,
//! information criteria, and percentile bias.

use crate::describe::empirical_quantile;
use crate::dist::FamilySpec;
use crate::error::Result;
use crate::fit;
use crate::math;
use crate::sample::Sample;
use crate::sum::CompensatedSum;

/// All fit-quality metrics for one (family, sample) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GofReport {
    pub neg2_log_lik: f64,
    pub aic: f64,
    pub bic: f64,
    pub ks: f64,
    pub ad: f64,
    /// Number of estimated parameters.
    pub p: usize,
    /// Sample size.
    pub n: usize,
}

/// Tail diagnostics from the Anderson-Darling computation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AdDiagnostics {
    /// CDF values clamped away from 0 or 1 to keep logs finite.
    pub clamped: usize,
    /// Tied observations encountered in the sorted sample.
    pub ties: usize,
}

/// Observed-vs-fitted percentile comparison at one level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PercentileBias {
    pub level: f64,
    /// Empirical quantile of the sample (m/s).
    pub observed: f64,
    /// Quantile of the fitted distribution (m/s).
    pub estimated: f64,
    /// estimated - observed.
    pub bias: f64,
}

/// KS = sup_x |F_n(x) - F(x)|, evaluated exactly on the sorted sample:
/// the supremum of a right-continuous step function against a continuous
/// CDF is attained just before or at an order statistic.
pub fn ks_statistic(spec: &FamilySpec, sample: &Sample) -> Result<f64> {
    let sorted = sample.sorted();
    let n = sorted.len() as f64;
    let mut sup: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = spec.cdf(x)?;
        let upper = (i as f64 + 1.0) / n - f;
        let lower = f - i as f64 / n;
        sup = sup.max(upper).max(lower);
    }
    Ok(sup)
}

const AD_CDF_FLOOR: f64 = 1e-300;
const AD_CDF_CEIL: f64 = 1.0 - 1e-16;

/// Ordered-sample Anderson-Darling statistic:
/// AD = -n - sum (2i - 1)/n * [ln F(x_(i)) + ln(1 - F(x_(n+1-i)))].
pub fn ad_statistic(spec: &FamilySpec, sample: &Sample) -> Result<f64> {
    ad_statistic_detailed(spec, sample).map(|(v, _)| v)
}

/// As [`ad_statistic`], also reporting tail clamping and tie counts.
pub fn ad_statistic_detailed(
    spec: &FamilySpec,
    sample: &Sample,
) -> Result<(f64, AdDiagnostics)> {
    let sorted = sample.sorted();
    let n = sorted.len();
    let nf = n as f64;
    let mut diag = AdDiagnostics::default();
    let mut cdfs = alloc::vec::Vec::with_capacity(n);
    for (i, &x) in sorted.iter().enumerate() {
        if i > 0 && x == sorted[i - 1] {
            diag.ties += 1;
        }
        let mut f = spec.cdf(x)?;
        if f < AD_CDF_FLOOR {
            f = AD_CDF_FLOOR;
            diag.clamped += 1;
        } else if f > AD_CDF_CEIL {
            f = AD_CDF_CEIL;
            diag.clamped += 1;
        }
        cdfs.push(f);
    }
    let mut acc = CompensatedSum::new();
    for i in 1..=n {
        let weight = (2 * i - 1) as f64 / nf;
        acc.add(weight * (math::ln(cdfs[i - 1]) + math::log1p(-cdfs[n - i])));
    }
    Ok((-nf - acc.value(), diag))
}

/// AIC = 2p + (-2 ln L); BIC = p ln n + (-2 ln L).
pub fn information_criteria(neg2_log_lik: f64, p: usize, n: usize) -> (f64, f64) {
    let aic = 2.0 * p as f64 + neg2_log_lik;
    let bic = p as f64 * math::ln(n as f64) + neg2_log_lik;
    (aic, bic)
}

/// Observed (empirical, type-7) vs estimated (model quantile) percentile.
pub fn percentile_bias(spec: &FamilySpec, sample: &Sample, level: f64) -> Result<PercentileBias> {
    if !(level > 0.0 && level < 1.0) {
        return Err(crate::error::Error::Domain("percentile level must be in (0, 1)"));
    }
    let sorted = sample.sorted();
    let observed = empirical_quantile(&sorted, level);
    let estimated = spec.quantile(level)?;
    Ok(PercentileBias {
        level,
        observed,
        estimated,
        bias: estimated - observed,
    })
}

/// Full metric set for a fitted spec on a sample.
pub fn gof_report(spec: &FamilySpec, sample: &Sample) -> Result<GofReport> {
    let neg2 = -2.0 * fit::log_likelihood(spec, sample)?;
    let p = spec.family().param_count();
    let n = sample.n();
    let (aic, bic) = information_criteria(neg2, p, n);
    Ok(GofReport {
        neg2_log_lik: neg2,
        aic,
        bic,
        ks: ks_statistic(spec, sample)?,
        ad: ad_statistic(spec, sample)?,
        p,
        n,
    })
}
