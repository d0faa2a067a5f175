//! Float helpers for the `no_std` build and shared tolerances.

/// Absolute tolerance used when comparing distances and fractional values.
pub const EPS: f64 = 1e-9;

#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn powi(x: f64, n: i32) -> f64 {
    libm::pow(x, n as f64)
}

#[inline]
pub fn round(x: f64) -> f64 {
    libm::round(x)
}

/// True when `x` is within `EPS` of an integer.
#[inline]
pub fn is_integral(x: f64) -> bool {
    (x - round(x)).abs() <= EPS
}

/// Total order on floats for sorting; NaN sorts last.
#[inline]
pub fn cmp_f64(a: f64, b: f64) -> core::cmp::Ordering {
    a.partial_cmp(&b).unwrap_or_else(|| a.is_nan().cmp(&b.is_nan()))
}

/// Sorted, deduplicated copy of `values` (within `EPS`).
pub fn distinct_sorted(values: &mut alloc::vec::Vec<f64>) {
    values.sort_by(|a, b| cmp_f64(*a, *b));
    values.dedup_by(|a, b| (*a - *b).abs() <= EPS);
}

#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}
