//! Λ(τ,s) = -τ^{s/2}/s + τ^{s/2} ∫_0^∞ e^{us/2} ψ(τ e^u) du  (x = e^u).
//!
//! Gauss–Legendre panels in u with node counts taken from the Bernstein-ellipse
//! error bound: on a panel of half-width r the integrand is analytic inside the
//! ellipse of semi-minor axis b < π/2 - |arg τ|, where |e^{ws/2}| grows at most
//! like e^{|t| b/2} and |ψ(τe^w)| is bounded by the theta envelope.

use std::f64::consts::{FRAC_PI_2, LN_2, PI};

use rug::{Complex, Float};

use super::bounds::{ln_psi_envelope, solve_cutoff};
use super::series::ln_abs_tau_pow;
use crate::error::{Error, Result};
use crate::numerics::{gauss_legendre, mag2, pi};

const NODE_SIZES: [usize; 13] = [8, 12, 16, 24, 32, 48, 64, 96, 128, 192, 256, 384, 512];

pub(crate) struct QuadOut {
    pub lambda: Complex,
    pub deriv: Option<Complex>,
}

#[derive(Clone, Copy)]
struct Geometry {
    sigma: f64,
    t: f64,
    tau_abs: f64,
    tau_arg: f64,
    deriv: bool,
}

impl Geometry {
    fn new(s: &Complex, tau: &Complex, deriv: bool) -> Self {
        let (tr, ti) = (tau.real().to_f64(), tau.imag().to_f64());
        Geometry {
            sigma: s.real().to_f64(),
            t: s.imag().to_f64(),
            tau_abs: tr.hypot(ti),
            tau_arg: ti.atan2(tr),
            deriv,
        }
    }

    fn strip(&self) -> f64 {
        FRAC_PI_2 - self.tau_arg.abs()
    }

    /// ln max |e^{ws/2} ψ(τe^w)| over lo <= Re w <= hi, |Im w| <= b.
    fn ln_bound(&self, lo: f64, hi: f64, b: f64) -> f64 {
        let c = (self.tau_arg.abs() + b).cos();
        if c <= 0.0 {
            return f64::INFINITY;
        }
        let y = self.tau_abs * lo.exp() * c;
        let growth = if self.sigma >= 0.0 { self.sigma * hi } else { self.sigma * lo } / 2.0;
        let mut v = growth + self.t.abs() * b / 2.0 + ln_psi_envelope(y);
        if self.deriv {
            v += ((hi.abs().max(lo.abs()) + b) / 2.0).max(1.0).ln();
        }
        v
    }

    /// ln ∫_0^U |e^{us/2} ψ(τe^u)| du estimated on a fine grid.
    fn ln_envelope_integral(&self, upper: f64) -> f64 {
        let steps = 400usize;
        let h = upper / steps as f64;
        let mut best = f64::NEG_INFINITY;
        let vals: Vec<f64> = (0..=steps)
            .map(|i| {
                let u = i as f64 * h;
                let v = self.sigma * u / 2.0 + ln_psi_envelope(self.tau_abs * u.exp() * self.tau_arg.cos());
                best = best.max(v);
                v
            })
            .collect();
        let sum: f64 = vals.iter().map(|v| (v - best).exp()).sum();
        best + (sum * h).max(f64::MIN_POSITIVE).ln()
    }

    /// Upper limit U in u such that the neglected tail is below e^{tol_ln}.
    fn cutoff(&self, tol_ln: f64) -> f64 {
        let a = PI * self.tau_abs * self.tau_arg.cos();
        let p = self.sigma / 2.0 - 1.0 + if self.deriv { 1.0 } else { 0.0 };
        let x = solve_cutoff(p, a, tol_ln, |x| -(-(-a * x).exp_m1()).ln());
        x.ln().max(0.25)
    }
}

fn nodes_for(g: &Geometry, c: f64, r: f64, tol_ln: f64) -> Option<usize> {
    let delta = g.strip();
    let mut best: Option<usize> = None;
    for k in 0..40 {
        let b = delta * 0.97 * (1e-4f64).powf(1.0 - k as f64 / 39.0);
        let a = b.hypot(r);
        let rho = (b + a) / r;
        let ln_m = g.ln_bound(c - a, c + a, b);
        if !ln_m.is_finite() {
            continue;
        }
        let num = (64.0f64 / 15.0).ln() + ln_m + r.ln() - (rho * rho - 1.0).ln() - tol_ln;
        let n = if num <= 0.0 { 1.0 } else { num / (2.0 * rho.ln()) };
        if n.is_finite() && n <= 512.0 {
            let n = NODE_SIZES.iter().copied().find(|&m| m as f64 >= n).unwrap_or(512);
            best = Some(best.map_or(n, |cur| cur.min(n)));
        }
    }
    best
}

/// Panels (u0, u1, n) covering [0, upper] with the fewest nodes.
fn plan(g: &Geometry, upper: f64, tol_ln: f64) -> Result<Vec<(f64, f64, usize)>> {
    let mut best: Option<(usize, Vec<(f64, f64, usize)>)> = None;
    for k in -2..=12 {
        let h0 = 2f64.powi(-k);
        let count = (upper / h0).ceil().max(1.0) as usize;
        let h = upper / count as f64;
        let per_panel = tol_ln - (count as f64).ln();
        let mut panels = Vec::with_capacity(count);
        let mut total = 0usize;
        let mut ok = true;
        for i in 0..count {
            let u0 = i as f64 * h;
            match nodes_for(g, u0 + h / 2.0, h / 2.0, per_panel) {
                Some(n) => {
                    total += n;
                    panels.push((u0, (i + 1) as f64 * h, n));
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok && best.as_ref().is_none_or(|(tot, _)| total < *tot) {
            best = Some((total, panels));
        }
    }
    best.map(|(_, p)| p).ok_or(Error::RefinementLimit { nodes: 512 })
}

/// Σ_{n>=1} e^{-πn²w} for real w > 0.
fn psi_real(y: &Float, wp: u32) -> Float {
    let q = Float::with_val(wp, -Float::with_val(wp, y * pi(wp))).exp();
    let q2 = Float::with_val(wp, q.square_ref());
    let mut odd = q.clone();
    let mut term = q;
    let mut sum = Float::with_val(wp, 0);
    loop {
        sum += &term;
        odd *= &q2;
        term *= &odd;
        match (term.get_exp(), sum.get_exp()) {
            (Some(te), Some(se)) if i64::from(te) >= i64::from(se) - i64::from(wp) - 2 => {}
            _ => return sum,
        }
    }
}

fn psi_complex(w: &Complex, wp: u32) -> Complex {
    let q = Complex::with_val(wp, -Complex::with_val(wp, w * pi(wp))).exp();
    let q2 = Complex::with_val(wp, q.square_ref());
    let mut odd = q.clone();
    let mut term = q;
    let mut sum = Complex::with_val(wp, 0);
    loop {
        sum += &term;
        odd *= &q2;
        term *= &odd;
        match (mag2(&term), mag2(&sum)) {
            (Some(te), Some(se)) if te >= se - i64::from(wp) - 2 => {}
            _ => return sum,
        }
    }
}

/// Λ (and Λ' if asked) with absolute error about 2^tol_log2, computed at `wp` bits.
pub(crate) fn lambda_quad_abs(
    s: &Complex,
    tau: &Complex,
    tol_log2: f64,
    wp: u32,
    deriv: bool,
    max_nodes: usize,
) -> Result<QuadOut> {
    if s.real().is_zero() && s.imag().is_zero() {
        return Err(Error::pole("s = 0"));
    }
    let g = Geometry::new(s, tau, deriv);
    // tolerance on the integral I, which is multiplied by τ^{s/2}
    let tol_ln = tol_log2 * LN_2 - ln_abs_tau_pow(s, tau) - 2.0f64.ln();
    let upper = g.cutoff(tol_ln - 1.0);
    let panels = plan(&g, upper, tol_ln - 1.0)?;
    let total: usize = panels.iter().map(|p| p.2).sum();
    if total > max_nodes {
        return Err(Error::RefinementLimit { nodes: total });
    }

    let half_s = Complex::with_val(wp, s / 2u32);
    let real_tau = tau.imag().is_zero();
    let mut acc = Complex::with_val(wp, 0);
    let mut acc_d = Complex::with_val(wp, 0);
    let eval = |u: &Float, weight: &Float, acc: &mut Complex, acc_d: &mut Complex| {
        let x = Float::with_val(wp, u.exp_ref());
        let ph = Complex::with_val(wp, &half_s * u).exp();
        let val = if real_tau {
            let y = Float::with_val(wp, &x * tau.real());
            let p = psi_real(&y, wp);
            ph * p
        } else {
            let w = Complex::with_val(wp, tau * &x);
            ph * psi_complex(&w, wp)
        };
        let wv = Complex::with_val(wp, &val * weight);
        if deriv {
            let du = Complex::with_val(wp, &wv * u) / 2u32;
            *acc_d += du;
        }
        *acc += wv;
    };
    for &(u0, u1, n) in &panels {
        let rule = gauss_legendre(n, wp);
        // endpoints are exact f64 values shared by neighbouring panels
        let a = Float::with_val(wp, u0);
        let b = Float::with_val(wp, u1);
        let c = Float::with_val(wp, &a + &b) / 2u32;
        let r = Float::with_val(wp, &b - &a) / 2u32;
        let mut pacc = Complex::with_val(wp, 0);
        let mut pacc_d = Complex::with_val(wp, 0);
        for (xi, w) in rule.nodes.iter().zip(&rule.weights) {
            let dx = Float::with_val(wp, xi * &r);
            if xi.is_zero() {
                eval(&c, w, &mut pacc, &mut pacc_d);
            } else {
                eval(&Float::with_val(wp, &c + &dx), w, &mut pacc, &mut pacc_d);
                eval(&Float::with_val(wp, &c - &dx), w, &mut pacc, &mut pacc_d);
            }
        }
        acc += pacc * &r;
        acc_d += pacc_d * &r;
    }

    let ln_tau = Complex::with_val(wp, tau.ln_ref());
    let tau_pow = Complex::with_val(wp, &half_s * &ln_tau).exp();
    let inv_s = Complex::with_val(wp, s.recip_ref());
    let mut lambda = Complex::with_val(wp, &acc - &inv_s);
    lambda *= &tau_pow;
    let deriv = if deriv {
        // Λ' = (log τ / 2) Λ + τ^{s/2} (1/s² + I')
        let mut d = Complex::with_val(wp, inv_s.square_ref());
        d += &acc_d;
        d *= &tau_pow;
        let mut lt = Complex::with_val(wp, &ln_tau * &lambda);
        lt /= 2u32;
        d += lt;
        Some(d)
    } else {
        None
    };
    Ok(QuadOut {
        lambda,
        deriv,
    })
}

/// log2 of the size of the terms that make up Λ, ignoring cancellation.
pub(crate) fn scale_log2(s: &Complex, tau: &Complex) -> f64 {
    let g = Geometry::new(s, tau, false);
    let upper = g.cutoff(-60.0).max(1.0);
    let ln_int = g.ln_envelope_integral(upper);
    let (sr, si) = (s.real().to_f64(), s.imag().to_f64());
    let ln_pole = -sr.hypot(si).ln();
    (ln_abs_tau_pow(s, tau) + ln_int.max(ln_pole)) / LN_2
}

/// Λ (and optionally Λ') with relative error about 2^-prec. The magnitude
/// of Λ is first estimated cheaply, then the working precision is raised by
/// the cancellation between the integral and its size.
pub(crate) fn lambda_quad_rel(
    s: &Complex,
    tau: &Complex,
    prec: u32,
    deriv: bool,
    max_nodes: usize,
) -> Result<QuadOut> {
    if s.real().is_zero() && s.imag().is_zero() {
        return Err(Error::pole("s = 0"));
    }
    let scale = scale_log2(s, tau);
    // probe deeper below the term scale until the rough value rises clear of
    // the probe tolerance; past the cap the value is treated as zero
    let cap = 8.0 * f64::from(prec) + 4096.0;
    let mut depth = 40.0f64;
    let floor = loop {
        let rough = lambda_quad_abs(s, tau, scale - depth, depth as u32 + 32, false, max_nodes)?;
        if let Some(m) = mag2(&rough.lambda) {
            if m as f64 > scale - depth + 16.0 {
                break m as f64 - 1.0;
            }
        }
        if depth >= cap {
            break scale - depth;
        }
        depth = (2.0 * depth + 32.0).min(cap);
    };
    let tol = floor - f64::from(prec) - 4.0;
    let wp = ((scale - tol).ceil() as i64 + 24).max(i64::from(prec) + 16) as u32;
    let mut out = lambda_quad_abs(s, tau, tol, wp, deriv, max_nodes)?;
    out.lambda.set_prec(prec);
    if let Some(d) = out.deriv.as_mut() {
        d.set_prec(prec);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::cplx;

    #[test]
    fn value_at_one_half() {
        let out = lambda_quad_rel(&cplx(128, 0.5, 0.0), &cplx(128, 1.0, 0.0), 128, false, 1_000_000).unwrap();
        let e = Float::parse("-1.98848311275325643965").unwrap();
        let d = Float::with_val(128, out.lambda.real() - &Float::with_val(128, e)).abs();
        assert!(d < 1e-19);
    }

    #[test]
    fn plan_scales_with_height() {
        // at the critical-line working tolerance e^{-πt/4} the node count grows with t
        let tau = cplx(64, 1.0, 0.0);
        let n = |t: f64| {
            let g = Geometry::new(&cplx(64, 0.5, t), &tau, false);
            let tol = -PI * t / 4.0 - 40.0;
            plan(&g, g.cutoff(tol), tol).unwrap().iter().map(|p| p.2).sum::<usize>()
        };
        let (lo, hi) = (n(25.0), n(400.0));
        assert!(hi > 4 * lo, "{hi} {lo}");
    }
}
