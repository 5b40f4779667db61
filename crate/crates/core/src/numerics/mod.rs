//! Shared numerical building blocks: Gauss–Legendre and Filon-type panel
//! rules, Richardson tables, the generalized exponential integral of complex
//! argument, small dense least squares, and phase-accurate products.

pub mod expint;
pub mod extrapolate;
pub mod linalg;
pub mod ode;
pub mod quadrature;

use num_complex::Complex64;

/// Error-free product: `a * b = hi + lo` exactly.
#[inline]
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let hi = a * b;
    let lo = a.mul_add(b, -hi);
    (hi, lo)
}

/// Error-free sum: `a + b = hi + lo` exactly.
#[inline]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let hi = a + b;
    let bb = hi - a;
    let lo = (a - (hi - bb)) + (b - bb);
    (hi, lo)
}

/// `exp(i (hi + lo))` for a phase split into a large head and a tiny tail.
#[inline]
pub fn cis_split(hi: f64, lo: f64) -> Complex64 {
    let (s, c) = hi.sin_cos();
    let (sl, cl) = lo.sin_cos();
    Complex64::new(c * cl - s * sl, s * cl + c * sl)
}

/// `exp(i a b)` with the product formed without rounding error.
#[inline]
pub fn cis_prod(a: f64, b: f64) -> Complex64 {
    let (hi, lo) = two_prod(a, b);
    cis_split(hi, lo)
}
