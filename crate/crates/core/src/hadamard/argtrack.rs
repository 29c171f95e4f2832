//! Continuous arg Λ(1/2+it) from arg Λ(1/2) = π, a(t) = π/2 - arg, and the
//! factor u(t) in Z(t) = u(t)·a(t).

use std::io::Write;

use rug::{Complex, Float};

use crate::error::{Error, Result};
use crate::lambda::{f_modulus, lambda_series_prec, precision_threshold};
use crate::numerics::{decimal, pi};
use crate::precision::PrecisionContext;

/// Λ(1/2+it) at max(bits, threshold(t)) + 32 bits.
fn lambda_on_line(t: f64, ctx: &PrecisionContext) -> Result<Complex> {
    let wp = ctx.bits().max(precision_threshold(t)) + 32;
    let s = Complex::with_val(wp, (0.5, t));
    let tau = Complex::with_val(wp, 1);
    lambda_series_prec(&s, &tau, wp, ctx.max_terms())
}

fn step_at(t: f64) -> f64 {
    0.1f64.min(1.0 / (2.0 * (2.0 + t).ln()))
}

/// Samples of the continuous argument along the critical line.
#[derive(Clone, Debug)]
pub struct ArgTrack {
    pub t_grid: Vec<f64>,
    pub arg_values: Vec<Float>,
    pub a_values: Vec<Float>,
    /// Λ(1/2+it) at each grid point.
    pub lambda_values: Vec<Complex>,
}

impl ArgTrack {
    /// Grid midpoints where a(t) changes sign, restricted to (lo, hi].
    pub fn sign_changes(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut out = Vec::new();
        for k in 1..self.t_grid.len() {
            let (t0, t1) = (self.t_grid[k - 1], self.t_grid[k]);
            if t0 < lo || t1 > hi {
                continue;
            }
            if self.a_values[k - 1].is_sign_negative() != self.a_values[k].is_sign_negative() {
                out.push((t0 + t1) / 2.0);
            }
        }
        out
    }

    /// max |a(t)| over grid points with t > t0.
    pub fn max_abs_a_beyond(&self, t0: f64) -> f64 {
        self.t_grid
            .iter()
            .zip(&self.a_values)
            .filter(|(t, _)| **t > t0)
            .map(|(_, a)| a.to_f64().abs())
            .fold(0.0, f64::max)
    }

    /// max |sΛ(s) + A| over the grid.
    pub fn max_s_lambda_plus(&self, a: &Float) -> f64 {
        self.t_grid
            .iter()
            .zip(&self.lambda_values)
            .map(|(t, l)| {
                let p = l.prec().0;
                let s = Complex::with_val(p, (0.5, *t));
                let mut v = Complex::with_val(p, &s * l);
                v += a;
                Float::with_val(64, v.abs_ref()).to_f64()
            })
            .fold(0.0, f64::max)
    }

    /// First grid t from which Im Λ decreases at every later step.
    pub fn im_monotone_onset(&self) -> Option<f64> {
        let n = self.lambda_values.len();
        let mut onset = None;
        for k in (1..n).rev() {
            if self.lambda_values[k].imag() < self.lambda_values[k - 1].imag() {
                onset = Some(self.t_grid[k - 1]);
            } else {
                break;
            }
        }
        onset
    }

    /// CSV with columns t, arg, a.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,arg,a")?;
        for ((t, arg), a) in self.t_grid.iter().zip(&self.arg_values).zip(&self.a_values) {
            let bits = arg.prec();
            writeln!(w, "{t},{},{}", decimal(arg, bits), decimal(a, bits))?;
        }
        Ok(())
    }
}

/// Tracks arg Λ(1/2+it) on [0, t_max] with step min(0.1, 1/(2 log(2+t))),
/// halving the step whenever the phase moves by π/2 or more.
pub fn arg_track(t_max: f64, ctx: &PrecisionContext) -> Result<ArgTrack> {
    if !(t_max > 0.0) {
        return Err(Error::Domain(format!("t_max must be positive, got {t_max}")));
    }
    let top = ctx.bits().max(precision_threshold(t_max)) + 32;
    let two_pi = Float::with_val(top, pi(top) * 2u32);
    let half_pi = Float::with_val(top, pi(top) / 2u32);

    let l0 = lambda_on_line(0.0, ctx)?;
    if !(*l0.real() < 0) {
        return Err(Error::StepFailure { t: 0.0 });
    }
    let mut track = ArgTrack {
        t_grid: vec![0.0],
        arg_values: vec![pi(top)],
        a_values: vec![Float::with_val(top, -&half_pi)],
        lambda_values: vec![l0],
    };
    let mut t = 0.0;
    let mut prev = pi(top);
    while t < t_max {
        let mut h = step_at(t);
        loop {
            let t1 = (t + h).min(t_max);
            let l = lambda_on_line(t1, ctx)?;
            if l.real().is_zero() && l.imag().is_zero() {
                return Err(Error::StepFailure { t: t1 });
            }
            let principal = Float::with_val(top, l.arg_ref());
            let mut d = Float::with_val(top, &principal - &prev);
            let turns = Float::with_val(top, &d / &two_pi).round();
            d -= Float::with_val(top, &turns * &two_pi);
            if d.to_f64().abs() < std::f64::consts::FRAC_PI_2 {
                prev += d;
                t = t1;
                track.t_grid.push(t);
                track.arg_values.push(prev.clone());
                track.a_values.push(Float::with_val(top, &half_pi - &prev));
                track.lambda_values.push(l);
                break;
            }
            h /= 2.0;
            if h < 1e-9 {
                return Err(Error::StepFailure { t: t1 });
            }
        }
    }
    Ok(track)
}

/// a(t) = π/2 - arg Λ(1/2+it) for t >= 0, computed as atan2(Re Λ, Im Λ);
/// this is the continuous determination since arg Λ stays in (0, π].
pub fn a_value(t: f64, ctx: &PrecisionContext) -> Result<Float> {
    let l = lambda_on_line(t, ctx)?;
    Ok(Float::with_val(ctx.bits(), l.real().atan2_ref(l.imag())))
}

/// u(t) = Z(t)/a(t). With Λ = |Λ|(sin a + i cos a) this is 2|Λ| sin(a)/(a f(t)),
/// which also gives the limit Z'/a' at the zeros of a.
pub fn u_function(t: f64, ctx: &PrecisionContext) -> Result<Float> {
    if t < 0.0 {
        log::warn!("u(t) is not positive for t < 0 in general (t = {t})");
    }
    let l = lambda_on_line(t, ctx)?;
    let wp = l.prec().0;
    let a = Float::with_val(wp, l.real().atan2_ref(l.imag()));
    let sinc = if a.is_zero() {
        Float::with_val(wp, 1)
    } else {
        Float::with_val(wp, a.sin_ref()) / &a
    };
    let modulus = Float::with_val(wp, l.abs_ref());
    let ln_f = f_modulus(t, &ctx.with_bits(wp));
    let mut u = modulus * sinc * 2u32;
    u *= Float::with_val(wp, -ln_f).exp();
    Ok(Float::with_val(ctx.bits(), u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::z_from_l;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(128).unwrap()
    }

    #[test]
    fn anchored_at_pi() {
        let tr = arg_track(2.0, &ctx()).unwrap();
        assert_eq!(tr.arg_values[0], pi(tr.arg_values[0].prec()));
        assert_eq!(tr.t_grid[0], 0.0);
        assert_eq!(*tr.t_grid.last().unwrap(), 2.0);
        for w in tr.arg_values.windows(2) {
            assert!(Float::with_val(64, &w[1] - &w[0]).abs() < 1.6);
        }
    }

    #[test]
    fn track_matches_pointwise_a() {
        let c = ctx();
        let tr = arg_track(20.0, &c).unwrap();
        for k in [5, 50, tr.t_grid.len() - 1] {
            let a = a_value(tr.t_grid[k], &c).unwrap();
            let d = Float::with_val(128, &a - &tr.a_values[k]).abs();
            assert!(d < 1e-30, "t = {}", tr.t_grid[k]);
        }
    }

    #[test]
    fn u_is_z_over_a() {
        let c = PrecisionContext::new(192).unwrap();
        for t in [5.0, 15.0, 25.0] {
            let u = u_function(t, &c).unwrap();
            assert!(u > 0);
            let z = z_from_l(t, &c).unwrap();
            let a = a_value(t, &c).unwrap();
            let q = Float::with_val(192, &z / &a);
            let rel = Float::with_val(64, (q - &u) / &u).abs();
            assert!(rel < 1e-30, "t = {t}");
        }
    }

    #[test]
    fn u_limit_at_a_zeta_zero() {
        // Z'/a' by central differences around the first zero
        let c = PrecisionContext::new(192).unwrap();
        let g = 14.134_725_141_734_695;
        let h = 1e-6;
        let dz = (z_from_l(g + h, &c).unwrap() - z_from_l(g - h, &c).unwrap()).to_f64();
        let da = (a_value(g + h, &c).unwrap() - a_value(g - h, &c).unwrap()).to_f64();
        let u = u_function(g, &c).unwrap().to_f64();
        assert!((dz / da - u).abs() < 1e-6 * u.abs());
    }
}
