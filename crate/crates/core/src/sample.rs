//! Validated wind-speed samples with optional provenance.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Where a measured sample came from: tower height and year span.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Provenance {
    pub height_m: u32,
    /// Inclusive year range.
    pub years: (i32, i32),
}

/// A nonempty vector of positive, finite speeds (m/s).
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
    provenance: Option<Provenance>,
}

impl Sample {
    /// Validates that the sample is nonempty and strictly positive.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        if values.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(Error::Domain("sample values must be finite and > 0"));
        }
        Ok(Self { values, provenance: None })
    }

    pub fn with_provenance(mut self, height_m: u32, years: (i32, i32)) -> Self {
        self.provenance = Some(Provenance { height_m, years });
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn provenance(&self) -> Option<Provenance> {
        self.provenance
    }

    /// Values sorted ascending (a fresh vector; the sample is immutable).
    pub fn sorted(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn rejects_bad_values() {
        assert!(matches!(Sample::new(vec![]), Err(Error::EmptySample)));
        assert!(Sample::new(vec![1.0, 0.0]).is_err());
        assert!(Sample::new(vec![1.0, -2.0]).is_err());
        assert!(Sample::new(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn keeps_provenance() {
        let s = Sample::new(vec![1.0, 2.0]).unwrap().with_provenance(80, (2010, 2020));
        assert_eq!(s.provenance().unwrap().height_m, 80);
        assert_eq!(s.n(), 2);
    }
}
