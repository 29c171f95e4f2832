//! Zeros b_n of s·Λ(s): counting by the argument principle, Newton
//! refinement, the tiled atlas scan and its statistics.

mod atlas;
mod refine;
mod stats;
mod table;
mod winding;

pub use atlas::{enumerate_zeros, sigma_bound, AtlasOptions, ZeroAtlas};
pub use refine::refine_zero;
pub use stats::{n_formula, verify_halfplane, zero_stats, HalfplaneReport, LawRow, NRow, Violation, ZeroStats};
pub use table::{read_table, write_table, write_table_with};
pub use winding::{winding_number, PhaseCache};

use rug::{Complex, Float};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lambda::lambda_series_prec;

/// The real zero of Λ, for reference and defaults.
pub const B0_APPROX: f64 = 11.25170908146;

/// Axis-parallel rectangle [σ₁,σ₂]×[t₁,t₂].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect(pub [f64; 4]);

impl Rect {
    pub fn width(&self) -> f64 {
        self.0[1] - self.0[0]
    }

    pub fn height(&self) -> f64 {
        self.0[3] - self.0[2]
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.0[0] && x <= self.0[1] && y >= self.0[2] && y <= self.0[3]
    }
}

/// A rectangle to scan and the base spacing of the boundary samples.
#[derive(Clone, Debug)]
pub struct SearchRegion {
    pub rect: Rect,
    pub step: f64,
}

impl SearchRegion {
    pub fn new(rect: Rect, step: f64) -> Result<Self> {
        let [s1, s2, t1, t2] = rect.0;
        if !(s1 < s2 && t1 < t2) || !(step > 0.0) {
            return Err(Error::Domain(format!("degenerate region {:?} or step {step}", rect.0)));
        }
        Ok(SearchRegion { rect, step })
    }

    /// Region with the default boundary step min(0.25, 1/log(2+t)), rounded
    /// down to a power of two.
    pub fn with_default_step(rect: Rect) -> Result<Self> {
        let t = rect.0[2].abs().max(rect.0[3].abs());
        Self::new(rect, default_step(t))
    }
}

pub(crate) fn default_step(t: f64) -> f64 {
    let h = 0.25f64.min(1.0 / (2.0 + t).ln());
    2f64.powi(h.log2().floor() as i32)
}

/// One zero of s·Λ(s).
#[derive(Clone, Debug)]
pub struct ZeroRecord {
    /// 0 for b₀, n >= 1 for the zeros in the upper half plane ordered by modulus.
    pub n: i64,
    pub b: Complex,
    /// |sΛ(s)| at b.
    pub residual: Float,
    pub bits: u32,
    /// Box with winding number 1 around b.
    pub cert_box: Rect,
}

impl ZeroRecord {
    pub fn beta(&self) -> f64 {
        self.b.real().to_f64()
    }

    pub fn gamma(&self) -> f64 {
        self.b.imag().to_f64()
    }

    pub fn modulus(&self) -> f64 {
        self.beta().hypot(self.gamma())
    }

    /// The record for the conjugate zero b_{-n}.
    pub fn conjugate(&self) -> ZeroRecord {
        let [s1, s2, t1, t2] = self.cert_box.0;
        ZeroRecord {
            n: -self.n,
            b: Complex::with_val(self.bits, self.b.conj_ref()),
            residual: self.residual.clone(),
            bits: self.bits,
            cert_box: Rect([s1, s2, -t2, -t1]),
        }
    }
}

/// s·Λ(s) with τ = 1 through the incomplete gamma series, relative error
/// about 2^-prec; equals -1 at s = 0.
pub fn s_lambda(s: &Complex, prec: u32) -> Result<Complex> {
    if s.real().is_zero() && s.imag().is_zero() {
        return Ok(Complex::with_val(prec, -1));
    }
    let tau = Complex::with_val(prec, 1);
    let lam = lambda_series_prec(s, &tau, prec + 4, crate::precision::PrecisionContext::DEFAULT_MAX_TERMS)?;
    let mut v = Complex::with_val(prec + 4, &lam * s);
    v.set_prec(prec);
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::cplx;

    #[test]
    fn s_lambda_near_origin() {
        let one = Float::with_val(64, 1);
        for (x, y) in [(1e-3, 0.0), (-1e-3, 0.0), (0.0, 1e-3), (0.0, -1e-3)] {
            let v = s_lambda(&cplx(128, x, y), 128).unwrap();
            let d = Complex::with_val(128, &v + &one);
            assert!(Float::with_val(64, d.abs_ref()) < 1e-3);
        }
        assert_eq!(s_lambda(&cplx(64, 0.0, 0.0), 64).unwrap(), -1);
    }

    #[test]
    fn default_step_is_power_of_two() {
        assert_eq!(default_step(0.0), 0.25);
        assert_eq!(default_step(200.0), 0.125);
        assert_eq!(default_step(1e6), 0.0625);
    }

    #[test]
    fn conjugate_record() {
        let r = ZeroRecord {
            n: 3,
            b: cplx(64, 20.0, 40.0),
            residual: Float::with_val(64, 1e-30),
            bits: 64,
            cert_box: Rect([19.9, 20.1, 39.9, 40.1]),
        };
        let c = r.conjugate();
        assert_eq!(c.n, -3);
        assert_eq!(c.gamma(), -40.0);
        assert_eq!(c.cert_box.0, [19.9, 20.1, -40.1, -39.9]);
    }
}
