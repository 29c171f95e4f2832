//! Λ(τ,s) = -τ^{s/2}/s + π^{-s/2} Σ_{n>=1} n^{-s} Γ(s/2, πn²τ).

use std::f64::consts::{LN_2, PI};

use rug::{Complex, Float};

use super::bounds::ln_tail_unit;
use crate::error::{Error, Result};
use crate::numerics::{mag2, pi, upper_gamma};

/// ln |τ^{s/2}| from f64 data.
pub(crate) fn ln_abs_tau_pow(s: &Complex, tau: &Complex) -> f64 {
    let (sigma, t) = (s.real().to_f64(), s.imag().to_f64());
    let (tr, ti) = (tau.real().to_f64(), tau.imag().to_f64());
    (sigma * tr.hypot(ti).ln() - t * ti.atan2(tr)) / 2.0
}

fn pass(s: &Complex, tau: &Complex, wp: u32, max_terms: usize) -> Result<(Complex, i64, usize)> {
    let half_s = Complex::with_val(wp, s / 2u32);
    let ln_tau = Complex::with_val(wp, tau.ln_ref());
    let tau_pow = Complex::with_val(wp, &half_s * &ln_tau).exp();
    let lead = -Complex::with_val(wp, &tau_pow / s);
    let ln_pi = Float::with_val(wp, pi(wp).ln_ref());
    let pi_fac = Complex::with_val(wp, -Complex::with_val(wp, &half_s * &ln_pi)).exp();

    let sigma = s.real().to_f64();
    let re_tau = tau.real().to_f64();
    let ln_tp = ln_abs_tau_pow(s, tau);
    let p = sigma / 2.0 - 1.0;

    let mut sum = Complex::with_val(wp, 0);
    let mut max_mag = mag2(&lead).unwrap_or(i64::MIN);
    let pi_tau = Complex::with_val(wp, tau * pi(wp));
    for n in 1..=max_terms {
        let nn = (n as u64) * (n as u64);
        let z = Complex::with_val(wp, &pi_tau * nn);
        let g = upper_gamma(&half_s, &z, wp)?;
        let ln_n = Float::with_val(wp, n as u64).ln();
        let n_pow = Complex::with_val(wp, -Complex::with_val(wp, s * &ln_n)).exp();
        let mut term = Complex::with_val(wp, &pi_fac * &n_pow);
        term *= &g;
        if let Some(m) = mag2(&term) {
            max_mag = max_mag.max(m);
        }
        sum += &term;

        // Σ_{m>n} |term_m| <= |τ^{s/2}| ∫_1^∞ x^p Σ_{m>n} e^{-πm² Re τ x} dx
        let m1 = (n + 1) as f64;
        let c = PI * m1 * m1 * re_tau;
        // 1 / (1 - e^{-π Re τ (2n+3)}) from the geometric majorant
        let ratio = -PI * re_tau * (2.0 * m1 + 1.0);
        let geo = -(-ratio.exp_m1()).ln();
        let tail_ln = ln_tp + ln_tail_unit(p, c) + geo;
        if tail_ln.is_finite() {
            let partial = Complex::with_val(wp, &lead + &sum);
            let partial_log2 = mag2(&partial).map_or(max_mag, |m| m) as f64;
            if tail_ln / LN_2 < partial_log2 - f64::from(wp) - 4.0 {
                let value = Complex::with_val(wp, &lead + &sum);
                let lost = match mag2(&value) {
                    Some(m) => max_mag - m,
                    None => i64::from(wp),
                };
                return Ok((value, lost.max(0), n));
            }
        }
    }
    Err(Error::NonConvergence {
        what: "incomplete gamma series for Λ",
        limit: max_terms,
    })
}

/// Λ(τ,s) by the incomplete gamma series, relative error about 2^-prec.
pub(crate) fn lambda_series_prec(s: &Complex, tau: &Complex, prec: u32, max_terms: usize) -> Result<Complex> {
    if s.real().is_zero() && s.imag().is_zero() {
        return Err(Error::pole("s = 0"));
    }
    let mut guard = 16u32;
    loop {
        let (mut v, lost, _) = pass(s, tau, prec + guard, max_terms)?;
        if lost + 8 <= i64::from(guard) {
            v.set_prec(prec);
            return Ok(v);
        }
        let need = u32::try_from(lost + 24).unwrap_or(u32::MAX);
        if need > 8 * prec + 4096 {
            return Err(Error::PrecisionLoss {
                needed: prec.saturating_add(need),
                available: prec + guard,
            });
        }
        guard = need.max(guard + 16);
    }
}
