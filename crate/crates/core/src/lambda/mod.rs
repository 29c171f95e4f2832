//! Λ(τ,s) = -τ^{s/2}/s + τ^{s/2} ∫_1^∞ x^{s/2-1} ψ(τx) dx, the entire function
//! 𝓛(τ,s) = Λ(τ,s) / (π^{-s/2} Γ(s/2)), and the quantities built from them.

mod bounds;
mod critical;
mod identities;
mod quad;
mod series;
mod zeta;

pub use critical::{
    f_modulus, precision_threshold, riemann_siegel_theta, xi_and_xi, z_from_l, z_oracle, XiValues,
};
pub use identities::{mellin_barnes_check, verify_decomposition};
pub use zeta::zeta_oracle;

pub(crate) use quad::lambda_quad_rel;
pub(crate) use series::lambda_series_prec;
pub(crate) use zeta::zeta_prec;

use rug::{Complex, Float};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{ln_gamma, pi};
use crate::precision::PrecisionContext;

/// Above this |Im s| the dispatcher uses quadrature.
pub const SERIES_MAX_HEIGHT: f64 = 50.0;

/// A point s with the splitting parameter τ (Re τ > 0).
#[derive(Clone, Debug)]
pub struct EvalPoint {
    pub s: Complex,
    pub tau: Complex,
}

impl EvalPoint {
    pub fn new(s: Complex, tau: Complex) -> Result<Self> {
        if !(*tau.real() > 0) {
            return Err(Error::Domain(format!(
                "tau must have positive real part, got {}",
                tau.real().to_f64()
            )));
        }
        Ok(EvalPoint { s, tau })
    }

    /// τ = 1.
    pub fn unit(s: Complex) -> Self {
        let prec = s.prec().0;
        EvalPoint {
            s,
            tau: Complex::with_val(prec, 1),
        }
    }

    pub fn from_f64(sigma: f64, t: f64, prec: u32) -> Self {
        Self::unit(Complex::with_val(prec, (sigma, t)))
    }

    pub fn sigma(&self) -> f64 {
        self.s.real().to_f64()
    }

    pub fn t(&self) -> f64 {
        self.s.imag().to_f64()
    }

    fn is_origin(&self) -> bool {
        self.s.real().is_zero() && self.s.imag().is_zero()
    }

    fn at_prec(&self, prec: u32) -> (Complex, Complex) {
        (Complex::with_val(prec, &self.s), Complex::with_val(prec, &self.tau))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Series,
    Quadrature,
}

/// Λ in polar and rectangular form.
#[derive(Clone, Debug)]
pub struct LambdaValue {
    /// ln |Λ|
    pub log_modulus: Float,
    /// arg Λ in (-π, π]
    pub phase: Float,
    pub value: Option<Complex>,
    pub route: Route,
}

impl LambdaValue {
    fn new(value: Complex, route: Route) -> Self {
        let prec = value.prec().0;
        let modulus = Float::with_val(prec, value.abs_ref());
        LambdaValue {
            log_modulus: modulus.ln(),
            phase: Float::with_val(prec, value.arg_ref()),
            value: Some(value),
            route,
        }
    }

    /// The rectangular value, rebuilt from the polar form if absent.
    pub fn complex(&self) -> Complex {
        match &self.value {
            Some(v) => v.clone(),
            None => {
                let prec = self.log_modulus.prec();
                let e = Complex::with_val(prec, (&self.log_modulus, &self.phase));
                e.exp()
            }
        }
    }
}

/// Rejects critical-line requests whose real part would be lost to rounding.
fn check_critical_precision(p: &EvalPoint, ctx: &PrecisionContext) -> Result<()> {
    if *p.s.real() == 0.5 {
        let needed = precision_threshold(p.t());
        if ctx.bits() < needed {
            return Err(Error::PrecisionLoss {
                needed,
                available: ctx.bits(),
            });
        }
    }
    Ok(())
}

/// Λ(τ,s) by quadrature of the defining integral.
pub fn lambda_completed(p: &EvalPoint, ctx: &PrecisionContext) -> Result<LambdaValue> {
    if p.is_origin() {
        return Err(Error::pole("s = 0"));
    }
    check_critical_precision(p, ctx)?;
    let (s, tau) = p.at_prec(ctx.bits() + 16);
    let out = lambda_quad_rel(&s, &tau, ctx.bits() + 8, false, ctx.max_terms())?;
    let mut v = out.lambda;
    v.set_prec(ctx.bits());
    Ok(LambdaValue::new(v, Route::Quadrature))
}

/// Λ(τ,s) by the incomplete gamma series.
pub fn lambda_series(p: &EvalPoint, ctx: &PrecisionContext) -> Result<LambdaValue> {
    if p.is_origin() {
        return Err(Error::pole("s = 0"));
    }
    check_critical_precision(p, ctx)?;
    let (s, tau) = p.at_prec(ctx.bits() + 16);
    let mut v = lambda_series_prec(&s, &tau, ctx.bits() + 8, ctx.max_terms())?;
    v.set_prec(ctx.bits());
    Ok(LambdaValue::new(v, Route::Series))
}

/// Λ(τ,s), series route for |Im s| <= 50 and quadrature above.
pub fn lambda(p: &EvalPoint, ctx: &PrecisionContext) -> Result<LambdaValue> {
    if p.t().abs() <= SERIES_MAX_HEIGHT {
        lambda_series(p, ctx)
    } else {
        lambda_completed(p, ctx)
    }
}

/// Dispatching Λ with relative error about 2^-prec, no critical-line check.
pub(crate) fn lambda_prec(s: &Complex, tau: &Complex, prec: u32, max_terms: usize) -> Result<Complex> {
    if s.imag().to_f64().abs() <= SERIES_MAX_HEIGHT {
        lambda_series_prec(s, tau, prec, max_terms)
    } else {
        Ok(lambda_quad_rel(s, tau, prec, false, max_terms)?.lambda)
    }
}

/// ln(π^{-s/2} Γ(s/2)).
pub(crate) fn ln_gamma_factor(s: &Complex, prec: u32) -> Result<Complex> {
    let half = Complex::with_val(prec, s / 2u32);
    let mut lg = ln_gamma(&half, prec)?;
    let ln_pi = Float::with_val(prec, pi(prec).ln_ref());
    lg -= Complex::with_val(prec, &half * &ln_pi);
    Ok(lg)
}

fn is_trivial_zero(s: &Complex) -> bool {
    s.imag().is_zero() && s.real().is_integer() && *s.real() < 0 && {
        let half = Float::with_val(s.prec().0, s.real() / 2u32);
        half.is_integer()
    }
}

/// 𝓛(τ,s) = Λ(τ,s) / (π^{-s/2}Γ(s/2)) through the series route; exactly 0 at s = -2n.
pub fn l_function_series(p: &EvalPoint, ctx: &PrecisionContext) -> Result<Complex> {
    if p.is_origin() {
        return Err(Error::pole("s = 0"));
    }
    if is_trivial_zero(&p.s) {
        return Ok(Complex::with_val(ctx.bits(), 0));
    }
    let wp = ctx.bits() + 16;
    let (s, tau) = p.at_prec(wp);
    let lam = lambda_series_prec(&s, &tau, wp, ctx.max_terms())?;
    let mut v = divide_gamma_factor(lam, &s, wp)?;
    v.set_prec(ctx.bits());
    Ok(v)
}

/// 𝓛 through whichever Λ route the dispatcher picks.
pub fn l_function(p: &EvalPoint, ctx: &PrecisionContext) -> Result<Complex> {
    if p.is_origin() {
        return Err(Error::pole("s = 0"));
    }
    if is_trivial_zero(&p.s) {
        return Ok(Complex::with_val(ctx.bits(), 0));
    }
    let wp = ctx.bits() + 16;
    let (s, tau) = p.at_prec(wp);
    let lam = lambda_prec(&s, &tau, wp, ctx.max_terms())?;
    let mut v = divide_gamma_factor(lam, &s, wp)?;
    v.set_prec(ctx.bits());
    Ok(v)
}

fn divide_gamma_factor(lam: Complex, s: &Complex, wp: u32) -> Result<Complex> {
    let lg = ln_gamma_factor(s, wp)?;
    let inv = Complex::with_val(wp, -lg).exp();
    Ok(lam * inv)
}

/// dΛ/ds from the differentiated integral,
/// Λ' = (log τ/2) Λ + τ^{s/2} [1/s² + ∫_1^∞ x^{s/2-1} (log x / 2) ψ(τx) dx].
pub fn lambda_derivative(p: &EvalPoint, ctx: &PrecisionContext) -> Result<Complex> {
    if p.is_origin() {
        return Err(Error::pole("s = 0"));
    }
    let (s, tau) = p.at_prec(ctx.bits() + 16);
    let out = lambda_quad_rel(&s, &tau, ctx.bits() + 8, true, ctx.max_terms())?;
    let mut d = out.deriv.expect("derivative requested");
    d.set_prec(ctx.bits());
    Ok(d)
}
