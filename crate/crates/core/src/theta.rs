//! θ(z) = Σ_{n∈Z} e^{-πn²z} and ψ(x) = (θ(x) - 1)/2 on Re z > 0.

use std::f64::consts::{LOG2_E, PI};

use rug::{Complex, Float};

use crate::error::{Error, Result};
use crate::numerics::{mag2, pi};
use crate::precision::PrecisionContext;

/// A theta value with its truncation data.
#[derive(Clone, Debug)]
pub struct ThetaValue {
    pub value: Complex,
    /// Number of n >= 1 terms summed (after any modular reduction).
    pub terms_used: usize,
    /// Bound on the omitted tail, 2 e^{-πN² Re z} / (1 - e^{-π Re z}).
    pub tail_bound: Float,
}

fn check_domain(z: &Complex) -> Result<()> {
    if *z.real() > 0 && z.imag().is_finite() && z.real().is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "theta needs Re z > 0, got {} + {}i",
            z.real().to_f64(),
            z.imag().to_f64()
        )))
    }
}

/// Σ_{n>=1} e^{-πn²z} summed term by term until the tail bound drops below
/// 2^-wp times the running sum (or 2^-wp absolutely when the sum is tiny and
/// `floor_abs` is set).
fn sum_direct(z: &Complex, wp: u32, max_terms: usize) -> Result<(Complex, usize, Float)> {
    let re = z.real().to_f64();
    // log2 |q| with q = e^{-πz}
    let lq = -PI * re * LOG2_E;
    let pz = Complex::with_val(wp, z * pi(wp));
    let q = Complex::with_val(wp, -pz).exp();
    let q2 = Complex::with_val(wp, q.square_ref());
    let mut odd = q.clone(); // q^{2n+1}
    let mut term = q; // q^{n²}
    let mut sum = Complex::with_val(wp, 0);
    let denom_log2 = -(1.0 - lq.exp2()).log2();
    for n in 1..=max_terms {
        sum += &term;
        odd *= &q2;
        term *= &odd;
        let m = (n + 1) as f64;
        let tail_log2 = 1.0 + m * m * lq + denom_log2;
        let sum_log2 = mag2(&sum).map_or(0, |v| v.min(0)) as f64;
        if tail_log2 < sum_log2 - f64::from(wp) {
            let tail = Float::with_val(64, tail_log2).exp2();
            return Ok((sum, n, tail));
        }
    }
    Err(Error::NonConvergence {
        what: "theta series",
        limit: max_terms,
    })
}

/// Moves z into |Im z| <= 1, |z| >= 1 using θ(z + 2i) = θ(z) and
/// θ(z) = θ(1/z)/√z. Returns the reduced point and the accumulated factor.
fn reduce(z: &Complex, wp: u32) -> (Complex, Complex) {
    let mut w = z.clone();
    w.set_prec(wp);
    let mut factor = Complex::with_val(wp, 1);
    for _ in 0..64 {
        let shift = (w.imag().to_f64() / 2.0).round();
        if shift != 0.0 {
            *w.mut_imag() -= 2.0 * shift;
        }
        let r2 = Float::with_val(wp, w.norm_ref());
        if r2 >= 1 || *w.real() >= 0.1 {
            break;
        }
        let root = Complex::with_val(wp, w.sqrt_ref());
        factor /= root;
        w = Complex::with_val(wp, w.recip_ref());
    }
    (w, factor)
}

/// θ(z) for Re z > 0.
pub fn theta(z: &Complex, ctx: &PrecisionContext) -> Result<ThetaValue> {
    check_domain(z)?;
    let wp = ctx.wp(16);
    let (w, factor) = if *z.real() < 0.1 { reduce(z, wp) } else { (Complex::with_val(wp, z), Complex::with_val(wp, 1)) };
    let (sum, terms, tail) = sum_direct(&w, wp, ctx.max_terms())?;
    let mut v = Complex::with_val(wp, &sum * 2u32);
    v += 1u32;
    v *= &factor;
    let mut tail = Float::with_val(64, &tail * 2u32);
    tail *= Float::with_val(64, factor.abs_ref());
    v.set_prec(ctx.bits());
    Ok(ThetaValue {
        value: v,
        terms_used: terms,
        tail_bound: tail,
    })
}

/// ψ(x) = (θ(x) - 1)/2 = Σ_{n>=1} e^{-πn²x}.
pub fn psi(x: &Complex, ctx: &PrecisionContext) -> Result<Complex> {
    check_domain(x)?;
    let mut v = psi_prec(x, ctx.bits() + 8, ctx.max_terms())?;
    v.set_prec(ctx.bits());
    Ok(v)
}

pub(crate) fn psi_prec(x: &Complex, prec: u32, max_terms: usize) -> Result<Complex> {
    if *x.real() >= 0.1 {
        return Ok(sum_direct(x, prec + 8, max_terms)?.0);
    }
    // through θ; the subtraction of 1 loses at most log2|θ / ψ| bits, which
    // is small away from the real axis and absent near it (θ grows like x^-1/2)
    let mut guard = 24u32;
    loop {
        let wp = prec + guard;
        let (w, factor) = reduce(x, wp);
        let (sum, _, _) = sum_direct(&w, wp, max_terms)?;
        let mut th = Complex::with_val(wp, &sum * 2u32);
        th += 1u32;
        th *= &factor;
        let big = mag2(&th).unwrap_or(0).max(0);
        th -= 1u32;
        th /= 2u32;
        let lost = big - mag2(&th).unwrap_or(-i64::from(wp));
        if lost + 8 <= i64::from(guard) || guard > 4 * prec {
            return Ok(th);
        }
        guard = (lost + 24) as u32;
    }
}

/// |θ(1/z) - √z θ(z)| with both theta values summed directly (no reduction).
pub fn theta_functional_check(z: &Complex, ctx: &PrecisionContext) -> Result<Float> {
    check_domain(z)?;
    let wp = ctx.wp(24);
    let inv = Complex::with_val(wp, z.recip_ref());
    check_domain(&inv)?;
    let direct = |w: &Complex| -> Result<Complex> {
        let (sum, _, _) = sum_direct(w, wp, ctx.max_terms())?;
        let mut t = Complex::with_val(wp, &sum * 2u32);
        t += 1u32;
        Ok(t)
    };
    let lhs = direct(&inv)?;
    let mut rhs = direct(&Complex::with_val(wp, z))?;
    rhs *= Complex::with_val(wp, z.sqrt_ref());
    let d = Complex::with_val(wp, &lhs - &rhs);
    Ok(Float::with_val(ctx.bits(), d.abs_ref()))
}
