//! Thin wrappers over `libm` for the float operations `core` does not
//! provide. Routing everything through one software implementation keeps
//! results bit-identical across platforms.

pub const LN_2: f64 = core::f64::consts::LN_2;

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn log1p(x: f64) -> f64 {
    libm::log1p(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn expm1(x: f64) -> f64 {
    libm::expm1(x)
}

#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

/// ln(1 - e^w) for w < 0, accurate over the whole range.
///
/// Splits at -ln 2: `ln(-expm1(w))` is exact-to-rounding for small |w|,
/// `log1p(-exp(w))` for large |w|.
#[inline]
pub fn log1mexp(w: f64) -> f64 {
    if w > -LN_2 {
        ln(-expm1(w))
    } else {
        log1p(-exp(w))
    }
}
