//! Euler–Maclaurin evaluation of ζ(s), independent of the Λ machinery.

use rug::{Complex, Float};

use crate::error::{Error, Result};
use crate::numerics::{log2_abs, mag2, with_bernoulli};
use crate::precision::PrecisionContext;

/// ζ(s) with relative error <= ctx.eps.
pub fn zeta_oracle(s: &Complex, ctx: &PrecisionContext) -> Result<Complex> {
    let mut v = zeta_prec(s, ctx.bits() + 8)?;
    v.set_prec(ctx.bits());
    Ok(v)
}

struct Attempt {
    value: Complex,
    /// log2 of the remainder bound
    remainder: f64,
    /// log2 of the largest partial quantity (for the cancellation estimate)
    scale: f64,
}

/// ζ(s) = Σ_{n<N} n^-s + N^{1-s}/(s-1) + N^-s/2
///        + Σ_{k=1}^K B_{2k}/(2k)! s(s+1)...(s+2k-2) N^{-s-2k+1} + R,
/// |R| <= |next term| |s+2K+1| / (σ+2K+1).
fn attempt(s: &Complex, n_cut: u64, k_terms: usize, wp: u32) -> Attempt {
    let sigma = s.real().to_f64();
    let mut sum = Complex::with_val(wp, 0);
    let mut scale = 0.0f64;
    // n^-s is completely multiplicative: only primes need an exponential
    let mut pows: Vec<Complex> = Vec::with_capacity(n_cut as usize);
    pows.push(Complex::with_val(wp, 0));
    if n_cut > 1 {
        pows.push(Complex::with_val(wp, 1));
    }
    for n in 2..n_cut {
        let term = match smallest_factor(n) {
            p if p < n => Complex::with_val(wp, &pows[p as usize] * &pows[(n / p) as usize]),
            _ => {
                let ln_n = Float::with_val(wp, n).ln();
                Complex::with_val(wp, -Complex::with_val(wp, s * &ln_n)).exp()
            }
        };
        pows.push(term);
    }
    for term in &pows[1..] {
        sum += term;
    }
    if sigma < 0.0 {
        scale = scale.max(-sigma * (n_cut as f64).log2());
    }
    let ln_n = Float::with_val(wp, n_cut).ln();
    let n_pow = Complex::with_val(wp, -Complex::with_val(wp, s * &ln_n)).exp(); // N^-s
    let s_minus_1 = Complex::with_val(wp, s - 1u32);
    let mut integral = Complex::with_val(wp, &n_pow * n_cut);
    integral /= &s_minus_1;
    scale = scale.max(log2_abs(&integral));
    sum += &integral;
    sum += Complex::with_val(wp, &n_pow / 2u32);

    let n_f = Float::with_val(wp, n_cut);
    let inv_n2 = Float::with_val(wp, n_f.square_ref()).recip();
    // N^{-s-2k+1} starting at k = 1
    let mut npow = Complex::with_val(wp, &n_pow / &n_f);
    let mut poch = Complex::with_val(wp, s); // s (s+1) ... (s+2k-2)
    let mut fact = Float::with_val(wp, 2); // (2k)!
    let remainder = with_bernoulli(k_terms + 1, |bern| {
        for k in 1..=k_terms {
            let b = Float::with_val(wp, &bern[k - 1]);
            let mut term = Complex::with_val(wp, &poch * &npow);
            term *= Float::with_val(wp, &b / &fact);
            scale = scale.max(log2_abs(&term));
            sum += term;
            // advance to k+1
            let a = Complex::with_val(wp, s + (2 * k as u32 - 1));
            let c = Complex::with_val(wp, s + 2 * k as u32);
            poch *= a;
            poch *= c;
            npow *= &inv_n2;
            fact *= (2 * k as u32 + 1) * (2 * k as u32 + 2);
        }
        let kk = k_terms as u32;
        let den = sigma + 2.0 * kk as f64 + 1.0;
        if den <= 0.0 {
            return f64::INFINITY;
        }
        let b = Float::with_val(wp, &bern[k_terms]);
        let mut next = Complex::with_val(wp, &poch * &npow);
        next *= Float::with_val(wp, &b / &fact);
        let extra = Complex::with_val(wp, s + (2 * kk + 1));
        log2_abs(&next) + log2_abs(&extra) - den.log2()
    });
    Attempt {
        value: sum,
        remainder,
        scale,
    }
}

/// Smallest N (and a K <= 128 for it) whose estimated Euler–Maclaurin
/// correction term falls below 2^-bits, from |B_2k|/(2k)! ~ 2 (2π)^-2k.
fn plan(sigma: f64, t: f64, bits: u32) -> (u64, usize) {
    let two_pi_log2 = (2.0 * std::f64::consts::PI).log2();
    let mut n = (3.0 + t / 2.0).ceil() as u64;
    loop {
        let ln_n = (n as f64).log2();
        // log2 of |s(s+1)...(s+2k-2)| N^{-σ-2k+1} |B_2k|/(2k)!
        let mut poch = (sigma.hypot(t)).max(1e-300).log2();
        for k in 1..=128usize {
            let est = 1.0 + poch - 2.0 * k as f64 * two_pi_log2 - (sigma + 2.0 * k as f64 - 1.0) * ln_n;
            if est < -f64::from(bits) && sigma + 2.0 * k as f64 + 1.0 > 0.0 {
                return (n, k);
            }
            let j = 2.0 * k as f64;
            poch += (sigma + j - 1.0).hypot(t).log2() + (sigma + j).hypot(t).log2();
        }
        n += n / 4 + 1;
    }
}

fn smallest_factor(n: u64) -> u64 {
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            return p;
        }
        p += 1;
    }
    n
}

/// ζ(s) with relative error about 2^-prec.
pub(crate) fn zeta_prec(s: &Complex, prec: u32) -> Result<Complex> {
    if s.imag().is_zero() && *s.real() == 1 {
        return Err(Error::pole("s = 1"));
    }
    let t = s.imag().to_f64().abs();
    let sigma = s.real().to_f64();
    let (mut n_cut, mut k_terms) = plan(sigma, t, prec + 32);
    let mut guard = 24u32;
    for _ in 0..64 {
        let wp = prec + guard;
        let a = attempt(s, n_cut, k_terms, wp);
        // near a zero of ζ the relative target is floored at 2^-prec of the term scale
        let vlog = mag2(&a.value)
            .map_or(f64::NEG_INFINITY, |m| m as f64)
            .max(a.scale.max(0.0) - f64::from(prec));
        if a.remainder > vlog - f64::from(prec) - 2.0 {
            // terms of the correction sum keep shrinking while |s+2K| < 2πN
            let s_abs = sigma.hypot(t);
            if s_abs + 4.0 * k_terms as f64 + 2.0 < 2.0 * std::f64::consts::PI * n_cut as f64 && k_terms < 256 {
                k_terms *= 2;
            } else {
                n_cut *= 2;
            }
            continue;
        }
        let lost = (a.scale.max(0.0) - vlog).max(0.0);
        if lost + 8.0 <= f64::from(guard) {
            let mut v = a.value;
            v.set_prec(prec);
            return Ok(v);
        }
        guard = lost.ceil() as u32 + 24;
    }
    Err(Error::NonConvergence {
        what: "Euler-Maclaurin zeta",
        limit: n_cut as usize,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{cplx, pi};

    #[test]
    fn closed_forms() {
        let ctx = PrecisionContext::new(128).unwrap();
        let z2 = zeta_oracle(&cplx(128, 2.0, 0.0), &ctx).unwrap();
        let e = Float::with_val(128, pi(128).square_ref()) / 6u32;
        assert!(Float::with_val(128, z2.real() - &e).abs() < 1e-36);
        let z0 = zeta_oracle(&cplx(128, 0.0, 0.0), &ctx).unwrap();
        assert!(Float::with_val(128, z0.real() + 0.5f64).abs() < 1e-36);
        let zm = zeta_oracle(&cplx(128, -3.0, 0.0), &ctx).unwrap();
        assert!(Float::with_val(128, zm.real() - Float::with_val(128, 120u32).recip()).abs() < 1e-36);
        assert!(zeta_oracle(&cplx(128, 1.0, 0.0), &ctx).unwrap_err().is_domain());
    }

    #[test]
    fn near_first_zero() {
        let ctx = PrecisionContext::new(128).unwrap();
        let z = zeta_oracle(&cplx(128, 0.5, 14.1347251417), &ctx).unwrap();
        assert!(Float::with_val(128, z.abs_ref()) < 1e-8);
    }

    #[test]
    fn mpfr_agreement_on_reals() {
        let ctx = PrecisionContext::new(200).unwrap();
        for x in [0.5, 3.0, 7.25, -2.5] {
            let v = zeta_oracle(&cplx(200, x, 0.0), &ctx).unwrap();
            let r = Float::with_val(200, x).zeta();
            let d = (Float::with_val(200, v.real() - &r) / &r).abs();
            assert!(d.to_f64() < 1e-55, "x={x}");
        }
    }
}
