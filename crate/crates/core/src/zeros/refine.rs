//! Newton refinement of a zero of s·Λ(s) and its winding certificate.

use rug::{Complex, Float};

use super::winding::{winding_cached, PhaseCache};
use super::{s_lambda, Rect, ZeroRecord};
use crate::error::{Error, Result};
use crate::numerics::log2_abs;
use crate::precision::PrecisionContext;

/// Half-width of the trust box used when no enclosing box is supplied.
const DEFAULT_TRUST: f64 = 0.5;
const MAX_NEWTON: usize = 60;

/// s·Λ(s) and its derivative by a central difference of step 2^-(prec/3),
/// evaluated with enough extra bits that the difference quotient keeps
/// about 2prec/3 correct bits.
fn value_and_slope(s: &Complex, prec: u32) -> Result<(Complex, Complex)> {
    let h_log2 = prec / 3 + 2;
    let wp = prec + h_log2 + 16;
    let s = Complex::with_val(wp, s);
    let h = Float::with_val(wp, Float::i_exp(1, -(h_log2 as i32)));
    let f0 = s_lambda(&s, wp)?;
    let sp = Complex::with_val(wp, &s + &h);
    let sm = Complex::with_val(wp, &s - &h);
    let fp = s_lambda(&sp, wp)?;
    let fm = s_lambda(&sm, wp)?;
    let mut d = Complex::with_val(wp, &fp - &fm);
    d /= Float::with_val(wp, &h * 2u32);
    Ok((f0, d))
}

fn inside(rect: &Rect, z: &Complex) -> bool {
    let (x, y) = (z.real().to_f64(), z.imag().to_f64());
    let [s1, s2, t1, t2] = rect.0;
    x >= s1 && x <= s2 && y >= t1 && y <= t2
}

/// Newton iteration inside `trust`, stepping the precision up from 64 bits.
fn newton(seed: &Complex, trust: &Rect, ctx: &PrecisionContext) -> Result<Complex> {
    let bits = ctx.bits();
    let seed_str = format!("{} + {}i", seed.real().to_f64(), seed.imag().to_f64());
    let diverged = || Error::Divergence {
        seed: seed_str.clone(),
        bounds: trust.0,
    };
    let mut z = Complex::with_val(bits + 16, seed);
    let mut prec = 64u32;
    let mut last_step = f64::INFINITY;
    let mut slow = 0usize;
    for _ in 0..MAX_NEWTON {
        let (f, d) = value_and_slope(&z, prec)?;
        if d.real().is_zero() && d.imag().is_zero() {
            return Err(diverged());
        }
        let step = Complex::with_val(prec + 16, &f / &d);
        let step_log2 = log2_abs(&step);
        z -= &step;
        if !inside(trust, &z) {
            return Err(diverged());
        }
        let z_log2 = log2_abs(&z).max(0.0);
        // linear convergence is the signature of a multiple zero
        if step_log2.is_finite() && last_step.is_finite() && step_log2 > last_step - 1.5 && step_log2 < -8.0 {
            slow += 1;
            if slow == 4 {
                log::warn!("Newton converges linearly near {}; multiple zero suspected", seed_str);
            }
        }
        last_step = step_log2;
        if step_log2 < z_log2 - f64::from(prec) / 2.0 {
            if prec >= bits + 8 {
                if step_log2 < z_log2 - f64::from(bits) {
                    break;
                }
            } else {
                prec = (prec * 2).min(bits + 8);
            }
        }
        if step_log2 == f64::NEG_INFINITY {
            if prec >= bits + 8 {
                break;
            }
            prec = (prec * 2).min(bits + 8);
        }
    }
    Ok(z)
}

/// Box of half-width `r` centred on z, snapped outward to a 2^-12 lattice.
fn cert_box(z: &Complex, r: f64) -> Rect {
    let q = 4096.0;
    let (x, y) = (z.real().to_f64(), z.imag().to_f64());
    Rect([
        ((x - r) * q).floor() / q,
        ((x + r) * q).ceil() / q,
        ((y - r) * q).floor() / q,
        ((y + r) * q).ceil() / q,
    ])
}

/// Refines within `trust` and certifies a simple zero by winding 1 on a box of
/// half-width `cert` around the result.
pub(crate) fn refine_in(
    seed: &Complex,
    trust: &Rect,
    cert: f64,
    cache: &PhaseCache,
    ctx: &PrecisionContext,
) -> Result<ZeroRecord> {
    let z = newton(seed, trust, ctx)?;
    let bits = ctx.bits();
    let mut b = z;
    b.set_prec(bits);
    if b.imag().to_f64().abs() < 1e-300 {
        // the real zero: Newton on a real function keeps it real
        b = Complex::with_val(bits, (b.real(), 0));
    }
    let residual = Float::with_val(64, s_lambda(&b, bits)?.abs_ref());
    let rect = cert_box(&b, cert);
    let step = (cert / 4.0).min(0.125);
    let w = winding_cached(cache, &rect, step)?;
    if w != 1 {
        return Err(Error::SuspectedMissedZero {
            bounds: rect.0,
            parent: 1,
            children: w,
        });
    }
    Ok(ZeroRecord {
        n: 0,
        b,
        residual,
        bits,
        cert_box: rect,
    })
}

/// Zero of s·Λ(s) near `seed`, refined by Newton and certified by winding.
pub fn refine_zero(seed: &Complex, ctx: &PrecisionContext) -> Result<ZeroRecord> {
    let (x, y) = (seed.real().to_f64(), seed.imag().to_f64());
    let trust = Rect([x - DEFAULT_TRUST, x + DEFAULT_TRUST, y - DEFAULT_TRUST, y + DEFAULT_TRUST]);
    let cache = PhaseCache::new();
    let mut rec = refine_in(seed, &trust, 1.0 / 32.0, &cache, ctx)?;
    if rec.b.imag().is_sign_negative() && !rec.b.imag().is_zero() {
        rec.n = -1;
    } else if !rec.b.imag().is_zero() {
        rec.n = 1;
    }
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::cplx;

    #[test]
    fn real_zero_from_seed() {
        let ctx = PrecisionContext::new(128).unwrap();
        let r = refine_zero(&cplx(128, 11.3, 0.0), &ctx).unwrap();
        let d = (r.b.real().to_f64() - 11.25170908146).abs();
        assert!(d < 1e-11, "{}", r.b);
        assert!(r.b.imag().is_zero());
        assert!(r.residual < 1e-20);
    }

    #[test]
    fn leaves_trust_box() {
        let ctx = PrecisionContext::new(128).unwrap();
        let trust = Rect([2.0, 2.5, 3.0, 3.5]);
        let cache = PhaseCache::new();
        let e = refine_in(&cplx(128, 2.2, 3.2), &trust, 0.05, &cache, &ctx).unwrap_err();
        assert!(matches!(e, Error::Divergence { .. }), "{e}");
    }
}
