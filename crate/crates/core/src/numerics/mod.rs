//! Arbitrary-precision scalar kernels: log-gamma, the upper incomplete gamma
//! function and Gauss–Legendre quadrature for decaying integrands.
//!
//! Complex values are plain [`rug::Complex`]; every kernel is a pure function of
//! its arguments and the [`PrecisionContext`](crate::PrecisionContext).

mod bernoulli;
mod gamma;
mod incgamma;
mod quadrature;

pub use bernoulli::bernoulli_even;
pub(crate) use bernoulli::with_bernoulli;
pub use gamma::log_gamma;
pub(crate) use gamma::ln_gamma;
pub use incgamma::{gamma_upper, gamma_upper_route, IncGammaRoute};
pub(crate) use incgamma::upper_gamma;
pub use quadrature::{gauss_legendre, integrate_decaying, GaussLegendre};
pub(crate) use quadrature::integrate_interval;

use rug::{Complex, Float};

/// Arbitrary-precision complex number used throughout the crate.
pub type ComplexValue = Complex;

/// Approximate log2 of |z| from the binary exponents; `None` for zero.
///
/// Accurate to within one unit, which is all the truncation logic needs.
pub(crate) fn mag2(z: &Complex) -> Option<i64> {
    let re = z.real().get_exp().map(i64::from);
    let im = z.imag().get_exp().map(i64::from);
    match (re, im) {
        (Some(a), Some(b)) => Some(a.max(b)),
        (Some(a), None) | (None, Some(a)) => Some(a),
        (None, None) => None,
    }
}

/// log2 |z| as an `f64`, `-inf` for zero. Safe for magnitudes far outside the
/// `f64` range.
pub fn log2_abs(z: &Complex) -> f64 {
    if z.real().is_zero() && z.imag().is_zero() {
        return f64::NEG_INFINITY;
    }
    let a = Float::with_val(64, z.abs_ref());
    a.log2().to_f64()
}

/// Complex value from two `f64` components.
pub fn cplx(prec: u32, re: f64, im: f64) -> Complex {
    Complex::with_val(prec, (re, im))
}

pub(crate) fn pi(prec: u32) -> Float {
    Float::with_val(prec, rug::float::Constant::Pi)
}

/// True when `z` is exactly a non-positive integer.
pub(crate) fn is_nonpositive_integer(z: &Complex) -> bool {
    z.imag().is_zero() && z.real().is_integer() && *z.real() <= 0
}

/// `(re, im)` rounded to `f64`.
pub fn to_f64_pair(z: &Complex) -> (f64, f64) {
    (z.real().to_f64(), z.imag().to_f64())
}

/// Decimal rendering of a float with roughly `bits` worth of digits.
pub fn decimal(x: &Float, bits: u32) -> String {
    let digits = (f64::from(bits) * std::f64::consts::LOG10_2).ceil() as usize + 1;
    if x.is_zero() {
        return "0".to_string();
    }
    x.to_string_radix(10, Some(digits))
}
