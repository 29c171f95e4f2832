//! Numerical checks of π^{-s/2}Γ(s/2)ζ(s) = Λ(τ,s) + Λ(1/τ,1-s) and of the
//! Mellin–Barnes form of Λ(τ,s) + τ^{s/2}/s.

use std::f64::consts::{LN_2, PI};

use rug::{Complex, Float};

use super::{lambda_prec, ln_gamma_factor, zeta_prec, EvalPoint};
use crate::error::{Error, Result};
use crate::numerics::{integrate_interval, ln_gamma, log2_abs, mag2, pi};
use crate::precision::PrecisionContext;

fn decomposition_terms(p: &EvalPoint, wp: u32, max_terms: usize) -> Result<(Complex, Complex, Complex, Complex)> {
    let s = Complex::with_val(wp, &p.s);
    let tau = Complex::with_val(wp, &p.tau);
    let zeta = zeta_prec(&s, wp)?;
    let factor = ln_gamma_factor(&s, wp)?.exp();
    let lhs = Complex::with_val(wp, &factor * &zeta);
    let lam = lambda_prec(&s, &tau, wp, max_terms)?;
    let one_minus = Complex::with_val(wp, 1 - &s);
    let inv_tau = Complex::with_val(wp, tau.recip_ref());
    let dual = lambda_prec(&one_minus, &inv_tau, wp, max_terms)?;
    Ok((lhs, lam, dual, zeta))
}

/// |π^{-s/2}Γ(s/2)ζ(s) - Λ(τ,s) - Λ(1/τ,1-s)| / |lhs|, with ζ from the
/// Euler–Maclaurin oracle. Where |ζ(s)| < 10^-2 (the neighbourhood of a zeta
/// zero) the normaliser is max(|lhs|, |Λ(τ,s)|).
pub fn verify_decomposition(p: &EvalPoint, ctx: &PrecisionContext) -> Result<Float> {
    let s = &p.s;
    if s.imag().is_zero() && (s.real().is_zero() || *s.real() == 1) {
        return Err(Error::pole(format!("s = {}", s.real().to_f64())));
    }
    // the two Λ terms can dwarf their sum (e.g. near the critical line), so
    // the working precision is raised by the measured ratio
    let (lhs0, lam0, dual0, _) = decomposition_terms(p, 80, ctx.max_terms())?;
    let big = log2_abs(&lam0).max(log2_abs(&dual0));
    let ratio = (big - log2_abs(&lhs0)).clamp(0.0, f64::from(ctx.bits()));
    let wp = ctx.bits() + 16 + ratio.ceil() as u32;
    let (lhs, lam, dual, zeta) = decomposition_terms(p, wp, ctx.max_terms())?;
    let mut diff = Complex::with_val(wp, &lhs - &lam);
    diff -= &dual;
    let mut norm = Float::with_val(wp, lhs.abs_ref());
    if Float::with_val(64, zeta.abs_ref()) < 1e-2 {
        norm = norm.max(&Float::with_val(wp, lam.abs_ref()));
    }
    let r = Float::with_val(wp, diff.abs_ref()) / norm;
    Ok(Float::with_val(ctx.bits(), r))
}

/// ln of a bound for |π^{-z/2} Γ(z/2) ζ(z) τ^{-z/2}| at z = c + iy.
fn ln_integrand_envelope(c: f64, y: f64, tau_abs: f64, tau_arg: f64, ln_zeta_c: f64) -> f64 {
    let x = c / 2.0;
    let v = y.abs() / 2.0;
    let r = x.hypot(v).max(1.0);
    // Stirling with a factor 2 margin: |Γ(x+iv)| <= 2 √(2π) r^{x-1/2} e^{-πv/2} e^{1/(6r)}
    let ln_gamma = (2.0 * (2.0 * PI).sqrt()).ln() + (x - 0.5) * r.ln() - PI * v / 2.0 + 1.0 / (6.0 * r);
    ln_gamma + ln_zeta_c - (c / 2.0) * (PI.ln() + tau_abs.ln()) + y * tau_arg / 2.0
}

/// |Λ(τ,s) + τ^{s/2}/s - (τ^{s/2}/2πi) ∫_{c-iT}^{c+iT} π^{-z/2}Γ(z/2)ζ(z)τ^{-z/2}/(z-s) dz|
/// divided by max(1, |Λ(τ,s) + τ^{s/2}/s|).
pub fn mellin_barnes_check(p: &EvalPoint, c: f64, ctx: &PrecisionContext) -> Result<Float> {
    let sigma = p.sigma();
    let t = p.t();
    if !(c > sigma.max(1.0)) {
        return Err(Error::Domain(format!("c = {c} must exceed max(Re s, 1) = {}", sigma.max(1.0))));
    }
    if p.s.real().is_zero() && p.s.imag().is_zero() {
        return Err(Error::pole("s = 0"));
    }
    let wp = ctx.wp(32);
    let s = Complex::with_val(wp, &p.s);
    let tau = Complex::with_val(wp, &p.tau);
    let half_s = Complex::with_val(wp, &s / 2u32);
    let ln_tau = Complex::with_val(wp, tau.ln_ref());
    let tau_pow = Complex::with_val(wp, &half_s * &ln_tau).exp();
    let lam = lambda_prec(&s, &tau, wp, ctx.max_terms())?;
    let lhs = Complex::with_val(wp, &lam + Complex::with_val(wp, &tau_pow / &s));
    let lhs_log2 = log2_abs(&lhs).max(0.0);
    let target_log2 = lhs_log2 + ctx.eps_log2() - 3.0;

    // truncation height from the Γ decay
    let tau_abs = p.tau.real().to_f64().hypot(p.tau.imag().to_f64());
    let tau_arg = p.tau.imag().to_f64().atan2(p.tau.real().to_f64());
    let ln_zeta_c = Float::with_val(64, c).zeta().ln().to_f64();
    let ln_pref = (tau_pow.real().to_f64().hypot(tau_pow.imag().to_f64()) / (2.0 * PI)).ln();
    let tail_ln = |big_t: f64| -> f64 {
        // both tails, integrated numerically on the envelope
        let mut total = f64::NEG_INFINITY;
        for sign in [1.0, -1.0] {
            let mut y = big_t;
            let step: f64 = 0.25;
            let mut acc = f64::NEG_INFINITY;
            for _ in 0..20_000 {
                let dist = ((sign * y) - t).abs().max(c - sigma);
                let v = ln_integrand_envelope(c, sign * y, tau_abs, tau_arg, ln_zeta_c) - dist.ln() + step.ln();
                acc = log_add(acc, v);
                if v < acc - 60.0 {
                    break;
                }
                y += step;
            }
            total = log_add(total, acc + 1.0);
        }
        total + ln_pref
    };
    let target_ln = target_log2 * LN_2 - 1.0;
    let mut big_t = t.abs() + 8.0;
    while tail_ln(big_t) > target_ln {
        big_t *= 1.25;
        if big_t > 1e6 {
            return Err(Error::InsufficientHeight { nodes: ctx.max_terms() });
        }
    }

    let ln_pi = Float::with_val(wp, pi(wp).ln_ref());
    let ln_pi_tau = Complex::with_val(wp, &ln_tau + &ln_pi);
    let cf = Float::with_val(wp, c);
    let mut failure: Option<Error> = None;
    let mut integrand = |y: &Float| -> Complex {
        let z = Complex::with_val(wp, (&cf, y));
        let half_z = Complex::with_val(wp, &z / 2u32);
        let lg = match ln_gamma(&half_z, wp) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                return Complex::with_val(wp, 0);
            }
        };
        let zeta = match zeta_prec(&z, wp) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                return Complex::with_val(wp, 0);
            }
        };
        let mut e = lg;
        e -= Complex::with_val(wp, &half_z * &ln_pi_tau);
        let mut v = e.exp();
        v *= zeta;
        v /= Complex::with_val(wp, &z - &s);
        v
    };
    // break points at the pole ordinate and at 0 help the adaptive panels
    let mut cuts = vec![-big_t, big_t, 0.0];
    if t.abs() < big_t {
        cuts.push(t);
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    cuts.dedup();
    // integral tolerance in units of the prefactor τ^{s/2}/2π
    let atol = target_log2 - ln_pref / LN_2 - 1.0 - (cuts.len() as f64).log2();
    let mut integral = Complex::with_val(wp, 0);
    let mut evals = 0usize;
    for w in cuts.windows(2) {
        let a = Float::with_val(wp, w[0]);
        let b = Float::with_val(wp, w[1]);
        let (v, e) = integrate_interval(&mut integrand, &a, &b, atol, wp, ctx.max_terms().saturating_sub(evals))
            .map_err(|err| match err {
                Error::RefinementLimit { nodes } => Error::InsufficientHeight { nodes },
                other => other,
            })?;
        evals += e;
        integral += v;
    }
    if let Some(e) = failure {
        return Err(e);
    }
    log::debug!("Mellin-Barnes check: T = {big_t}, {evals} integrand evaluations at {wp} bits");
    // (τ^{s/2}/2πi) ∫ ... i dy = (τ^{s/2}/2π) ∫ ... dy
    let mut rhs = Complex::with_val(wp, &tau_pow * &integral);
    rhs /= Float::with_val(wp, pi(wp) * 2u32);
    let diff = Complex::with_val(wp, &lhs - &rhs);
    let mut r = Float::with_val(wp, diff.abs_ref());
    if mag2(&lhs).is_some_and(|m| m > 0) {
        r /= Float::with_val(wp, lhs.abs_ref());
    }
    Ok(Float::with_val(ctx.bits(), r))
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}
