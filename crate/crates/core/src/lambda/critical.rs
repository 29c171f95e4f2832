//! Quantities on the critical line s = 1/2 + it: ϑ(t), f(t), Z(t), and the
//! ξ/Ξ/F triple.

use std::f64::consts::{LN_2, PI};

use rug::{Complex, Float};

use super::{lambda_prec, zeta_prec};
use crate::error::{Error, Result};
use crate::numerics::{ln_gamma, pi};
use crate::precision::PrecisionContext;

/// Bits needed before Re Λ(1/2+it) rises above rounding: ⌈πt/(4 ln 2)⌉ + 64.
pub fn precision_threshold(t: f64) -> u32 {
    (PI * t.abs() / (4.0 * LN_2)).ceil() as u32 + 64
}

/// ln Γ(1/4 + it/2) - (1/4 + it/2) ln π, i.e. ln f(t) + iϑ(t).
fn ln_gamma_factor_critical(t: f64, wp: u32) -> Result<Complex> {
    let z = Complex::with_val(wp, (0.25, t / 2.0));
    let mut lg = ln_gamma(&z, wp)?;
    let ln_pi = Float::with_val(wp, pi(wp).ln_ref());
    lg -= Complex::with_val(wp, &z * &ln_pi);
    Ok(lg)
}

/// ϑ(t) = Im ln Γ(1/4+it/2) - (t/2) ln π, continuous with ϑ(0) = 0.
pub fn riemann_siegel_theta(t: f64, ctx: &PrecisionContext) -> Float {
    let wp = ctx.wp(16);
    let lg = ln_gamma_factor_critical(t, wp).expect("1/4 + it/2 is never a pole");
    Float::with_val(ctx.bits(), lg.imag())
}

/// ln f(t), f(t) = |π^{-s/2}Γ(s/2)| at s = 1/2+it.
pub fn f_modulus(t: f64, ctx: &PrecisionContext) -> Float {
    let wp = ctx.wp(16);
    let lg = ln_gamma_factor_critical(t, wp).expect("1/4 + it/2 is never a pole");
    Float::with_val(ctx.bits(), lg.real())
}

/// Z(t) = 2 Re Λ(1/2+it) / f(t).
pub fn z_from_l(t: f64, ctx: &PrecisionContext) -> Result<Float> {
    let needed = precision_threshold(t);
    if ctx.bits() < needed {
        return Err(Error::PrecisionLoss {
            needed,
            available: ctx.bits(),
        });
    }
    let wp = ctx.wp(32);
    let s = Complex::with_val(wp, (0.5, t));
    let tau = Complex::with_val(wp, 1);
    let lam = lambda_prec(&s, &tau, wp, ctx.max_terms())?;
    let ln_f = ln_gamma_factor_critical(t, wp)?.real().clone();
    let z = Float::with_val(wp, lam.real() * 2u32) * Float::with_val(wp, -ln_f).exp();
    Ok(Float::with_val(ctx.bits(), z))
}

/// Z(t) = Re(e^{iϑ(t)} ζ(1/2+it)) from the Euler–Maclaurin zeta.
pub fn z_oracle(t: f64, ctx: &PrecisionContext) -> Result<Float> {
    let wp = ctx.wp(16);
    let s = Complex::with_val(wp, (0.5, t));
    let zeta = zeta_prec(&s, wp)?;
    let theta = ln_gamma_factor_critical(t, wp)?.imag().clone();
    let rot = Complex::with_val(wp, (Float::with_val(wp, 0), theta)).exp();
    let z = Complex::with_val(wp, &rot * &zeta);
    Ok(Float::with_val(ctx.bits(), z.real()))
}

/// ξ(s), Ξ(z) and F(z) at s = 1/2 + iz.
#[derive(Clone, Debug)]
pub struct XiValues {
    pub xi: Complex,
    pub big_xi: Complex,
    pub f: Complex,
}

/// F(z) = (s(s-1)/2) Λ(s) with s = 1/2+iz, Ξ(z) = F(z) + F(-z), ξ(s) = Ξ(z).
pub fn xi_and_xi(z: &Complex, ctx: &PrecisionContext) -> Result<XiValues> {
    let wp = ctx.wp(24);
    let f_at = |w: &Complex| -> Result<Complex> {
        let iw = Complex::with_val(wp, w * Complex::with_val(wp, (0, 1)));
        let s = Complex::with_val(wp, iw + 0.5f64);
        let tau = Complex::with_val(wp, 1);
        let lam = lambda_prec(&s, &tau, wp, ctx.max_terms())?;
        let sm1 = Complex::with_val(wp, &s - 1u32);
        let mut v = Complex::with_val(wp, &s * &sm1);
        v /= 2u32;
        v *= lam;
        Ok(v)
    };
    // s = 0 is the simple pole of Λ, where sΛ(s) -> -1 gives F = (s-1)/2 · (-1) = 1/2
    let at_origin = |w: &Complex| w.real().is_zero() && *w.imag() == 0.5;
    let zw = Complex::with_val(wp, z);
    let minus = Complex::with_val(wp, -&zw);
    let f_plus = if at_origin(&zw) { Complex::with_val(wp, 0.5) } else { f_at(&zw)? };
    let f_minus = if at_origin(&minus) { Complex::with_val(wp, 0.5) } else { f_at(&minus)? };
    let mut big_xi = Complex::with_val(wp, &f_plus + &f_minus);
    big_xi.set_prec(ctx.bits());
    let mut f = f_plus;
    f.set_prec(ctx.bits());
    Ok(XiValues {
        xi: big_xi.clone(),
        big_xi,
        f,
    })
}
