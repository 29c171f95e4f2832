//! The product expansion of sΛ(s) over its zeros, the constant α, and the
//! argument of Λ on the critical line.

mod argtrack;

pub use argtrack::{a_value, arg_track, u_function, ArgTrack};

use rug::{Complex, Float};

use crate::error::{Error, Result};
use crate::numerics::{integrate_decaying, pi};
use crate::precision::PrecisionContext;
use crate::theta::{psi_prec, theta};
use crate::zeros::{refine_zero, s_lambda, ZeroRecord, B0_APPROX};

/// Constants of the product Λ(s) = -e^{-αs}/s ∏ (1 - s/b_n) e^{s/b_n}.
#[derive(Clone, Debug)]
pub struct ProductConstants {
    pub alpha: Float,
    /// A = θ(1) = 1 + 2Σ e^{-πn²}
    pub a: Float,
    pub b0: Float,
}

impl ProductConstants {
    pub fn compute(ctx: &PrecisionContext) -> Result<Self> {
        let alpha = alpha_constant(ctx)?;
        let one = Complex::with_val(ctx.bits(), 1);
        let a = theta(&one, ctx)?.value.real().clone();
        let seed = Complex::with_val(ctx.bits(), (B0_APPROX, 0.0));
        let b0 = refine_zero(&seed, ctx)?.b.real().clone();
        Ok(ProductConstants { alpha, a, b0 })
    }
}

/// α = ∫_1^∞ ψ(y) dy/y.
pub fn alpha_constant(ctx: &PrecisionContext) -> Result<Float> {
    let wp = ctx.wp(32);
    let max_terms = ctx.max_terms();
    let mut failed = None;
    let v = integrate_decaying(
        |y: &Float| {
            let x = Complex::with_val(wp, y);
            match psi_prec(&x, wp, max_terms) {
                Ok(p) => p / y,
                Err(e) => {
                    failed.get_or_insert(e);
                    Complex::with_val(wp, 0)
                }
            }
        },
        1.0,
        0.0,
        std::f64::consts::PI,
        ctx,
    )?;
    if let Some(e) = failed {
        return Err(e);
    }
    Ok(Float::with_val(ctx.bits(), v.real()))
}

/// α as Σ_n E₁(πn²), term by term.
pub fn alpha_from_e1(ctx: &PrecisionContext) -> Float {
    let wp = ctx.wp(16);
    let p = pi(wp);
    let mut sum = Float::with_val(wp, 0);
    for n in 1u64.. {
        // E₁(x) = -Ei(-x)
        let x = Float::with_val(wp, &p * (n * n));
        let term = -Float::with_val(wp, (-x).eint_ref());
        sum += &term;
        if term.is_zero() || term.get_exp().unwrap_or(0) < sum.get_exp().unwrap_or(0) - wp as i32 - 2 {
            break;
        }
    }
    Float::with_val(ctx.bits(), sum)
}

/// -α as the s-coefficient of log(-sΛ(s)) at s = 0, from a five-point
/// central difference with step 1/8.
pub fn alpha_from_log_expansion(ctx: &PrecisionContext) -> Result<Float> {
    let wp = ctx.wp(32);
    let g = |x: f64| -> Result<Float> {
        let s = Complex::with_val(wp, (x, 0.0));
        let v = s_lambda(&s, wp)?;
        Ok(Float::with_val(wp, -v.real()).ln())
    };
    let h = 0.125;
    let d = (g(-2.0 * h)? - g(2.0 * h)? + Float::with_val(wp, 8u32) * (g(h)? - g(-h)?)) / (12.0 * h);
    Ok(Float::with_val(ctx.bits(), -d))
}

/// The b₀ record and the first `cutoff` zeros above the real axis.
fn take_zeros(zeros: &[ZeroRecord], cutoff: usize) -> Result<(Option<&ZeroRecord>, Vec<&ZeroRecord>)> {
    let b0 = zeros.iter().find(|z| z.n == 0);
    let mut upper: Vec<&ZeroRecord> = zeros.iter().filter(|z| z.n > 0).collect();
    upper.sort_by_key(|z| z.n);
    if upper.len() < cutoff {
        return Err(Error::Domain(format!(
            "cutoff {cutoff} exceeds the {} zeros supplied",
            upper.len()
        )));
    }
    upper.truncate(cutoff);
    Ok((b0, upper))
}

/// -e^{-αs}/s ∏ (1 - s/b)e^{s/b} over b₀ and the conjugate pairs b_n, b_{-n}
/// with 1 <= n <= cutoff.
pub fn partial_product(
    s: &Complex,
    zeros: &[ZeroRecord],
    consts: &ProductConstants,
    cutoff: usize,
    ctx: &PrecisionContext,
) -> Result<Complex> {
    if s.real().is_zero() && s.imag().is_zero() {
        return Err(Error::pole("s = 0"));
    }
    let wp = ctx.wp(16);
    let s = Complex::with_val(wp, s);
    let (b0, upper) = take_zeros(zeros, cutoff)?;
    let mut exponent = -Complex::with_val(wp, &s * &consts.alpha);
    let mut prod = Complex::with_val(wp, 1);
    let mut factor = |b: &Complex| -> Result<()> {
        let q = Complex::with_val(wp, &s / b);
        let one_minus = Complex::with_val(wp, 1 - &q);
        if one_minus.real().is_zero() && one_minus.imag().is_zero() {
            return Err(Error::Domain("s is a zero of the product".into()));
        }
        prod *= one_minus;
        exponent += q;
        Ok(())
    };
    if let Some(z) = b0 {
        factor(&z.b)?;
    }
    for z in upper {
        factor(&z.b)?;
        factor(&Complex::with_val(wp, z.b.conj_ref()))?;
    }
    let mut v = Complex::with_val(wp, exponent.exp_ref());
    v *= prod;
    v /= &s;
    let mut v = -v;
    v.set_prec(ctx.bits());
    Ok(v)
}

/// Truncated series for a(t) = π/2 - arg Λ(1/2+it),
/// -π/2 + αt + arctan 2t - Σ_{|n|<=N} [arg(1 - s/b_n) + Im(s/b_n)],
/// with the size of the last included (paired) term.
pub fn a_series(
    t: f64,
    zeros: &[ZeroRecord],
    consts: &ProductConstants,
    cutoff: usize,
    ctx: &PrecisionContext,
) -> Result<(Float, Float)> {
    let wp = ctx.wp(16);
    let s = Complex::with_val(wp, (0.5, t));
    let (b0, upper) = take_zeros(zeros, cutoff)?;
    let term = |b: &Complex| -> Float {
        let q = Complex::with_val(wp, &s / b);
        let one_minus = Complex::with_val(wp, 1 - &q);
        Float::with_val(wp, one_minus.arg_ref()) + q.imag()
    };
    let half_pi = Float::with_val(wp, pi(wp) / 2u32);
    let mut v = Float::with_val(wp, &consts.alpha * t);
    v += Float::with_val(wp, 2.0 * t).atan();
    v -= &half_pi;
    let mut last = Float::with_val(wp, 0);
    if let Some(z) = b0 {
        last = term(&z.b);
        v -= &last;
    }
    for z in upper {
        last = term(&z.b) + term(&Complex::with_val(wp, z.b.conj_ref()));
        v -= &last;
    }
    Ok((Float::with_val(ctx.bits(), v), Float::with_val(64, last.abs())))
}
