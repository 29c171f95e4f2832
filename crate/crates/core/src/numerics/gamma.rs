use std::f64::consts::PI;

use rug::{Complex, Float};

use super::{is_nonpositive_integer, with_bernoulli};
use crate::error::{Error, Result};
use crate::precision::PrecisionContext;

/// Principal branch of log Γ(z) (analytic continuation from the positive
/// reals, cut along the negative real axis).
pub fn log_gamma(z: &Complex, ctx: &PrecisionContext) -> Result<Complex> {
    let mut v = ln_gamma(z, ctx.bits() + 8)?;
    v.set_prec(ctx.bits());
    Ok(v)
}

/// log2 of the Stirling tail bound after `k` terms for |w| = r, Re w >= 0.
fn stirling_tail_log2(k: usize, log2_r: f64) -> f64 {
    let j = 2.0 * (k as f64 + 1.0);
    // |B_j| <= 2 * 1.65 * j! / (2 pi)^j
    let log2_b = (2.0 * 1.65f64).log2() + ln_factorial(j) / std::f64::consts::LN_2
        - j * (2.0 * PI).log2();
    // sec^{j}(arg w / 2) <= 2^{j/2} for |arg w| <= pi/2
    log2_b - (j * (j - 1.0)).log2() - (j - 1.0) * log2_r + j / 2.0
}

fn ln_factorial(n: f64) -> f64 {
    if n < 2.0 {
        return 0.0;
    }
    // Stirling with one correction term; plenty for sizing decisions.
    n * n.ln() - n + 0.5 * (2.0 * PI * n).ln() + 1.0 / (12.0 * n)
}

/// Picks (terms, shift) minimising the work for an absolute target 2^-target.
fn plan(re: f64, im: f64, target: f64) -> (usize, u64) {
    let mut best: Option<(f64, usize, u64)> = None;
    let min_shift = if re < 0.0 { (-re).ceil() } else { 0.0 };
    for k in (4..=250usize).step_by(2) {
        // smallest log2 r with tail <= -target
        let t0 = stirling_tail_log2(k, 0.0);
        let log2_r = (t0 + target) / (2.0 * k as f64 + 1.0);
        let r = log2_r.exp2().max(1.0);
        let need = if im.abs() >= r {
            0.0
        } else {
            (r * r - im * im).sqrt() - re
        };
        let shift = need.max(min_shift).max(0.0).ceil();
        let cost = shift + 2.5 * k as f64;
        if best.is_none_or(|(c, _, _)| cost < c) {
            best = Some((cost, k, shift as u64));
        }
    }
    let (_, k, m) = best.expect("non-empty search");
    (k, m)
}

/// log Γ(z) with absolute error about 2^-prec (times max(1, |log Γ|)).
pub(crate) fn ln_gamma(z: &Complex, prec: u32) -> Result<Complex> {
    if is_nonpositive_integer(z) {
        return Err(Error::pole(format!("log_gamma({})", z.real().to_f64())));
    }
    let re = z.real().to_f64();
    let im = z.imag().to_f64();
    let target = f64::from(prec) + 12.0;
    let (k, shift) = plan(re, im, target);

    let size = (re.abs() + shift as f64).hypot(im).max(2.0);
    let guard = 24 + (size * size.ln()).log2().max(0.0).ceil() as u32 + (64 - (shift + 1).leading_zeros());
    let wp = prec + guard;

    let mut zw = Complex::with_val(wp, z);
    let w = Complex::with_val(wp, &zw + shift);
    let ln_w = Complex::with_val(wp, w.ln_ref());

    // (w - 1/2) ln w - w + ln(2 pi)/2
    let half = Float::with_val(wp, 0.5);
    let mut s = Complex::with_val(wp, &w - &half);
    s *= &ln_w;
    s -= &w;
    let ln_two_pi = Float::with_val(wp, Float::with_val(wp, rug::float::Constant::Pi) * 2u32).ln();
    s += Float::with_val(wp, &ln_two_pi * &half);

    // sum_{j=1}^{k} B_{2j} / (2j (2j-1) w^{2j-1})
    let inv_w = Complex::with_val(wp, w.recip_ref());
    let inv_w2 = Complex::with_val(wp, inv_w.square_ref());
    let mut pw = inv_w;
    with_bernoulli(k, |bern| {
        let mut acc = Complex::with_val(wp, 0);
        for (idx, b) in bern.iter().enumerate() {
            let j = 2 * (idx as u64 + 1);
            let coeff = Float::with_val(wp, b) / Float::with_val(wp, j * (j - 1));
            acc += Complex::with_val(wp, &pw * &coeff);
            pw *= &inv_w2;
        }
        s += acc;
    });

    if shift > 0 {
        // log Γ(z) = log Γ(z+m) - sum log(z+j); the product is logged once and the
        // branch restored from an f64 running sum of arguments.
        let mut prod = Complex::with_val(wp, 1);
        let mut arg_sum = 0.0f64;
        for j in 0..shift {
            arg_sum += im.atan2(re + j as f64);
            prod *= &zw;
            zw += 1u32;
        }
        let mut ln_prod = prod.ln();
        let principal = ln_prod.imag().to_f64();
        let turns = ((arg_sum - principal) / (2.0 * PI)).round();
        if turns != 0.0 {
            let two_pi = Float::with_val(wp, Float::with_val(wp, rug::float::Constant::Pi) * 2u32);
            let corr = Float::with_val(wp, &two_pi * turns);
            *ln_prod.mut_imag() += corr;
        }
        s -= ln_prod;
    }
    s.set_prec(prec);
    Ok(s)
}
