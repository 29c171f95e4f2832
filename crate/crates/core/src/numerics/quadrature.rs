use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rug::{Complex, Float};

use super::mag2;
use crate::error::{Error, Result};
use crate::precision::PrecisionContext;

/// Gauss–Legendre rule on [-1, 1]. Only the non-negative half is stored:
/// `nodes[i]` stands for the pair ±nodes[i] (the zero node, for odd n, once).
#[derive(Debug)]
pub struct GaussLegendre {
    pub n: usize,
    pub prec: u32,
    pub nodes: Vec<Float>,
    pub weights: Vec<Float>,
}

fn rule_cache() -> &'static Mutex<HashMap<(usize, u32), Arc<GaussLegendre>>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u32), Arc<GaussLegendre>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The n-point rule at (at least) `prec` bits, cached.
pub fn gauss_legendre(n: usize, prec: u32) -> Arc<GaussLegendre> {
    assert!(n >= 1, "a quadrature rule needs at least one node");
    let prec = prec.div_ceil(64) * 64;
    if let Some(r) = rule_cache().lock().expect("rule cache poisoned").get(&(n, prec)) {
        return Arc::clone(r);
    }
    let rule = Arc::new(compute_rule(n, prec));
    rule_cache()
        .lock()
        .expect("rule cache poisoned")
        .entry((n, prec))
        .or_insert(rule)
        .clone()
}

/// (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre(n: usize, x: &Float) -> (Float, Float) {
    let p = x.prec();
    let mut p0 = Float::with_val(p, 1);
    let mut p1 = x.clone();
    for k in 2..=n {
        let k = k as u32;
        let mut p2 = Float::with_val(p, x * &p1);
        p2 *= 2 * k - 1;
        p2 -= Float::with_val(p, &p0 * (k - 1));
        p2 /= k;
        p0 = p1;
        p1 = p2;
    }
    // P' = n (x P_n - P_{n-1}) / (x^2 - 1)
    let mut d = Float::with_val(p, x * &p1);
    d -= &p0;
    d *= n as u32;
    let den = Float::with_val(p, x.square_ref()) - 1u32;
    d /= den;
    (p1, d)
}

fn compute_rule(n: usize, prec: u32) -> GaussLegendre {
    let half = n.div_ceil(2);
    let wp = prec + 32;
    let mut nodes = Vec::with_capacity(half);
    let mut weights = Vec::with_capacity(half);
    for i in 0..half {
        let mut xf = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        if n % 2 == 1 && i == half - 1 {
            xf = 0.0;
        }
        // f64 polish, then Newton with doubling precision
        let mut x = Float::with_val(64, xf);
        if xf != 0.0 {
            for _ in 0..6 {
                let (p, d) = legendre(n, &x);
                x -= Float::with_val(64, &p / &d);
            }
            let mut bits = 48u32;
            while bits < wp {
                bits = (2 * bits).min(wp);
                x.set_prec(bits + 16);
                let (p, d) = legendre(n, &x);
                x -= Float::with_val(bits + 16, &p / &d);
            }
            x.set_prec(wp);
            let (p, d) = legendre(n, &x);
            x -= Float::with_val(wp, &p / &d);
        } else {
            x.set_prec(wp);
        }
        let (_, d) = legendre(n, &x);
        let one_minus = Float::with_val(wp, 1u32 - Float::with_val(wp, x.square_ref()));
        let w = Float::with_val(wp, 2u32 / (one_minus * d.square()));
        let mut x = x;
        x.set_prec(prec);
        nodes.push(x);
        weights.push(Float::with_val(prec, &w));
    }
    GaussLegendre { n, prec, nodes, weights }
}

/// Applies `rule` on [a, b]; `f` receives abscissae at the rule's precision.
pub(crate) fn panel_sum<F>(f: &mut F, a: &Float, b: &Float, rule: &GaussLegendre, wp: u32) -> Complex
where
    F: FnMut(&Float) -> Complex,
{
    let mid = Float::with_val(wp, a + b) / 2u32;
    let half = Float::with_val(wp, b - a) / 2u32;
    let mut acc = Complex::with_val(wp, 0);
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        let dx = Float::with_val(wp, x * &half);
        if x.is_zero() {
            let v = f(&mid);
            acc += Complex::with_val(wp, &v * w);
        } else {
            let xp = Float::with_val(wp, &mid + &dx);
            let xm = Float::with_val(wp, &mid - &dx);
            let mut v = f(&xp);
            v += f(&xm);
            acc += Complex::with_val(wp, &v * w);
        }
    }
    acc * half
}

fn base_nodes(prec: u32) -> usize {
    ((prec / 4).clamp(16, 192) as usize).div_ceil(8) * 8
}

/// ∫_a^b f with adaptive bisection: a panel is accepted when the n- and
/// 2n-point rules agree to 2^atol_log2 * (panel width / (b - a)).
/// Returns the value and the number of integrand evaluations.
pub(crate) fn integrate_interval<F>(
    f: &mut F,
    a: &Float,
    b: &Float,
    atol_log2: f64,
    wp: u32,
    max_evals: usize,
) -> Result<(Complex, usize)>
where
    F: FnMut(&Float) -> Complex,
{
    let n = base_nodes(wp);
    let coarse = gauss_legendre(n, wp);
    let fine = gauss_legendre(2 * n, wp);
    let total = Float::with_val(wp, b - a).to_f64().abs().max(f64::MIN_POSITIVE);
    let mut evals = 0usize;
    let mut acc = Complex::with_val(wp, 0);
    let mut stack = vec![(Float::with_val(wp, a), Float::with_val(wp, b), 0u32)];
    while let Some((lo, hi, depth)) = stack.pop() {
        let q1 = panel_sum(f, &lo, &hi, &coarse, wp);
        let q2 = panel_sum(f, &lo, &hi, &fine, wp);
        evals += 3 * n;
        if evals > max_evals {
            return Err(Error::RefinementLimit { nodes: evals });
        }
        let width = Float::with_val(53, &hi - &lo).to_f64().abs();
        let tol = atol_log2 + (width / total).log2();
        let diff = Complex::with_val(wp, &q1 - &q2);
        if mag2(&diff).is_none_or(|m| (m as f64) < tol) || depth > 60 {
            if depth > 60 {
                return Err(Error::RefinementLimit { nodes: evals });
            }
            acc += q2;
        } else {
            let mid = Float::with_val(wp, &lo + &hi) / 2u32;
            stack.push((mid.clone(), hi, depth + 1));
            stack.push((lo, mid, depth + 1));
        }
    }
    Ok((acc, evals))
}

/// ∫_lower^∞ f(x) dx for integrands with |f(x)| <= C e^{-decay_hint x}.
///
/// Beyond x = 1 the integral is taken in u = log x, where integrands like
/// x^{s/2-1} ψ(x) oscillate at a uniform rate; panels are sized from
/// `osc_freq_hint` (oscillations per unit of log x) and checked against a rule
/// of twice the order. The tail is cut where the envelope C e^{-decay x} / decay,
/// with C estimated from the last panel, drops below eps * |partial|.
pub fn integrate_decaying<F>(
    mut f: F,
    lower: f64,
    osc_freq_hint: f64,
    decay_hint: f64,
    ctx: &PrecisionContext,
) -> Result<Complex>
where
    F: FnMut(&Float) -> Complex,
{
    if !(decay_hint > 0.0) || !lower.is_finite() {
        return Err(Error::Domain(format!(
            "integrate_decaying needs decay_hint > 0 and finite lower, got {decay_hint}, {lower}"
        )));
    }
    let wp = ctx.wp(32);
    // pass 1: magnitude estimate
    let rough = decaying_pass(&mut f, lower, osc_freq_hint, decay_hint, None, 96, ctx.max_terms(), None)?;
    let scale = mag2(&rough.0).map_or(-(ctx.bits() as f64), |m| m as f64);
    let atol = scale + ctx.eps_log2() - 4.0;
    let (mut v, _) = decaying_pass(&mut f, lower, osc_freq_hint, decay_hint, Some(atol), wp, ctx.max_terms(), Some(rough.1))?;
    v.set_prec(ctx.bits());
    Ok(v)
}

type PassResult = (Complex, usize);

#[allow(clippy::too_many_arguments)]
fn decaying_pass<F>(
    f: &mut F,
    lower: f64,
    osc: f64,
    decay: f64,
    atol_log2: Option<f64>,
    wp: u32,
    max_evals: usize,
    panels_hint: Option<usize>,
) -> Result<PassResult>
where
    F: FnMut(&Float) -> Complex,
{
    // without an absolute target (first pass) aim for ~48 bits relative
    let panels_est = panels_hint.unwrap_or(64).max(8) as f64;
    let per_panel = atol_log2.unwrap_or(-64.0) - (2.0 * panels_est).log2();
    let mut evals = 0usize;
    let mut acc = Complex::with_val(wp, 0);
    let mut panels = 0usize;

    // linear part on [lower, 1]
    let mut start = lower;
    if lower < 1.0 {
        let a = Float::with_val(wp, lower);
        let b = Float::with_val(wp, 1);
        let (v, e) = integrate_interval(f, &a, &b, per_panel, wp, max_evals)?;
        evals += e;
        acc += v;
        panels += 1;
        start = 1.0;
    }

    // log part: g(u) = f(e^u) e^u
    let mut g = |u: &Float| -> Complex {
        let x = Float::with_val(u.prec(), u.exp_ref());
        let v = f(&x);
        v * x
    };
    let n = base_nodes(wp);
    let mut u0 = start.ln();
    loop {
        let x0 = u0.exp();
        let width = (0.5f64)
            .min((n as f64 / 4.0) / (osc.abs() + 1.0))
            .min((n as f64 / 4.0) / (decay * x0));
        let u1 = u0 + width;
        let a = Float::with_val(wp, u0);
        let b = Float::with_val(wp, u1);
        let (v, e) = integrate_interval(&mut g, &a, &b, per_panel, wp, max_evals.saturating_sub(evals))?;
        evals += e;
        panels += 1;
        // envelope estimate from the panel's end point
        let x1 = u1.exp();
        let end = g(&Float::with_val(wp, u1));
        evals += 1;
        acc += v;
        let end_log2 = super::log2_abs(&end) - u1 * std::f64::consts::LOG2_E;
        // |f(x)| ~ C e^{-decay x}, tail ≈ |f(x1)| / decay
        let tail_log2 = end_log2 - decay.log2() + 1.0;
        let acc_log2 = mag2(&acc).map_or(f64::NEG_INFINITY, |m| m as f64);
        let limit = atol_log2.unwrap_or(acc_log2 - 48.0);
        if x1 * decay > 4.0 && (tail_log2 < limit || end_log2 == f64::NEG_INFINITY) {
            break;
        }
        if evals > max_evals {
            return Err(Error::RefinementLimit { nodes: evals });
        }
        u0 = u1;
    }
    Ok((acc, panels))
}
