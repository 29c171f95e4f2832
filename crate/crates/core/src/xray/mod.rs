//! X-ray plots: the curves where a function is real (thick) or purely
//! imaginary (thin), from a sign grid, with optional high-precision polishing.

mod render;
mod trace;

pub use render::{parse_csv, render, Canvas, Format};
pub use trace::{extract_curves, line_crossings, CurveKind, XRayCurve};

use std::str::FromStr;

use rayon::prelude::*;
use rug::{Assign, Complex, Float};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lambda::{l_function_series, lambda_series_prec, precision_threshold, EvalPoint};
use crate::precision::PrecisionContext;
use crate::zeros::{s_lambda, Rect};

/// Bits used for the grid scan.
pub const GRID_BITS: u32 = 64;
/// Radius of the disc around the pole of Λ left out of the grid.
pub const POLE_RADIUS: f64 = 0.1;
/// Default resolution for the figure regions.
pub const DEFAULT_RESOLUTION: usize = 400;

/// Functions that can be X-rayed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum XrayFunction {
    /// 𝓛(s)
    L,
    /// Λ(s) = π^{-s/2}Γ(s/2)𝓛(s)
    Lambda,
    /// sΛ(s)
    SLambda,
    /// ξ(s) = F(s) + F(1-s), F(s) = s(s-1)Λ(s)/2; real on the critical line
    Xi,
    /// f(s) = s, for checking the tracer
    Identity,
}

impl FromStr for XrayFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l" => Ok(XrayFunction::L),
            "lambda" => Ok(XrayFunction::Lambda),
            "slambda" => Ok(XrayFunction::SLambda),
            "xi" => Ok(XrayFunction::Xi),
            "identity" => Ok(XrayFunction::Identity),
            _ => Err(Error::Domain(format!("unknown function {s:?}"))),
        }
    }
}

impl XrayFunction {
    pub fn name(self) -> &'static str {
        match self {
            XrayFunction::L => "L",
            XrayFunction::Lambda => "Lambda",
            XrayFunction::SLambda => "sLambda",
            XrayFunction::Xi => "Xi",
            XrayFunction::Identity => "identity",
        }
    }

    fn masked(self, x: f64, y: f64) -> bool {
        self == XrayFunction::Lambda && x.hypot(y) < POLE_RADIUS
    }

    /// Whether the cell [x0, x1] x [y0, y1] touches the pole disc.
    pub(crate) fn cell_masked(self, x0: f64, x1: f64, y0: f64, y1: f64) -> bool {
        self.masked(0f64.clamp(x0, x1), 0f64.clamp(y0, y1))
    }

    /// f(s) with relative error about 2^-prec. Every choice is real on the
    /// real axis, and the value there is returned with Im exactly 0.
    pub fn eval(self, s: &Complex, prec: u32) -> Result<Complex> {
        let mut v = self.eval_raw(s, prec)?;
        if s.imag().is_zero() {
            v.mut_imag().assign(0);
        }
        Ok(v)
    }

    fn eval_raw(self, s: &Complex, prec: u32) -> Result<Complex> {
        let origin = s.real().is_zero() && s.imag().is_zero();
        let tau = Complex::with_val(prec, 1);
        match self {
            XrayFunction::Identity => Ok(Complex::with_val(prec, s)),
            XrayFunction::Lambda => lambda_series_prec(s, &tau, prec, PrecisionContext::DEFAULT_MAX_TERMS),
            XrayFunction::SLambda => s_lambda(s, prec),
            XrayFunction::L => {
                if origin {
                    // Λ ~ -1/s and Γ(s/2) ~ 2/s
                    return Ok(Complex::with_val(prec, -0.5));
                }
                let ctx = PrecisionContext::with_bits_unchecked(prec);
                l_function_series(&EvalPoint::new(Complex::with_val(prec, s), tau)?, &ctx)
            }
            XrayFunction::Xi => {
                let wp = prec + 16;
                let f = |w: Complex| -> Result<Complex> {
                    let wm1 = Complex::with_val(wp, &w - 1u32);
                    let mut v = Complex::with_val(wp, &w * &wm1);
                    if (w.real().is_zero() || *w.real() == 1) && w.imag().is_zero() {
                        // s(s-1)Λ(s)/2 -> 1/2 at s = 0 and s = 1
                        return Ok(Complex::with_val(wp, 0.5));
                    }
                    v /= 2u32;
                    let t = Complex::with_val(wp, 1);
                    v *= lambda_series_prec(&w, &t, wp, PrecisionContext::DEFAULT_MAX_TERMS)?;
                    Ok(v)
                };
                let s = Complex::with_val(wp, s);
                let reflected = Complex::with_val(wp, 1 - &s);
                let mut v = f(s)?;
                v += f(reflected)?;
                v.set_prec(prec);
                Ok(v)
            }
        }
    }

    /// Precision that resolves Re and Im at height t.
    pub(crate) fn fine_bits(self, t: f64, ctx: &PrecisionContext) -> u32 {
        match self {
            XrayFunction::Identity => ctx.bits(),
            _ => ctx.bits().max(precision_threshold(t)) + 32,
        }
    }
}

/// Signs of Re f and Im f at the nodes of an nx×ny grid.
#[derive(Clone, Debug)]
pub struct SignGrid {
    pub function: XrayFunction,
    pub region: Rect,
    pub nx: usize,
    pub ny: usize,
    /// Row-major (index j·nx + i), values -1, 0, 1.
    pub re_sign: Vec<i8>,
    pub im_sign: Vec<i8>,
    /// Nodes left out of tracing (pole disc or failed evaluation).
    pub mask: Vec<bool>,
    pub bits: u32,
    /// f/|f| at each node, for placing crossings along edges.
    pub(crate) unit: Vec<(f64, f64)>,
}

impl SignGrid {
    pub fn node(&self, i: usize, j: usize) -> (f64, f64) {
        let [s1, s2, t1, t2] = self.region.0;
        let x = s1 + (s2 - s1) * i as f64 / (self.nx - 1) as f64;
        let y = t1 + (t2 - t1) * j as f64 / (self.ny - 1) as f64;
        (x, y)
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn cell_width(&self) -> f64 {
        self.region.width() / (self.nx - 1) as f64
    }

    pub fn cell_height(&self) -> f64 {
        self.region.height() / (self.ny - 1) as f64
    }
}

fn sign(x: &Float) -> i8 {
    if x.is_zero() {
        0
    } else if x.is_sign_negative() {
        -1
    } else {
        1
    }
}

/// Re f, Im f signs at (x, y): 64 bits first, then the fine precision when a
/// component is below 2^-40 |f|.
pub(crate) fn node_value(function: XrayFunction, x: f64, y: f64, ctx: &PrecisionContext) -> Result<(i8, i8, (f64, f64))> {
    let s = Complex::with_val(GRID_BITS, (x, y));
    let mut v = function.eval(&s, GRID_BITS);
    let doubtful = |v: &Complex| {
        let m = Float::with_val(64, v.abs_ref());
        if m.is_zero() {
            return false;
        }
        let small = Float::with_val(64, v.real().abs_ref()).min(&Float::with_val(64, v.imag().abs_ref()));
        small.is_zero() || Float::with_val(64, &small / &m) < Float::with_val(64, Float::i_exp(1, -40))
    };
    if v.as_ref().map_or(true, doubtful) {
        let wp = function.fine_bits(y, ctx);
        let s = Complex::with_val(wp, (x, y));
        v = function.eval(&s, wp);
    }
    let v = v?;
    let m = Float::with_val(64, v.abs_ref());
    let unit = if m.is_zero() {
        (0.0, 0.0)
    } else {
        (
            Float::with_val(64, v.real() / &m).to_f64(),
            Float::with_val(64, v.imag() / &m).to_f64(),
        )
    };
    Ok((sign(v.real()), sign(v.imag()), unit))
}

/// Evaluates `function` on an nx×ny grid over `region`, rows in parallel.
pub fn sign_grid(function: XrayFunction, region: Rect, nx: usize, ny: usize, ctx: &PrecisionContext) -> Result<SignGrid> {
    let [s1, s2, t1, t2] = region.0;
    if nx < 2 || ny < 2 || !(s1 < s2 && t1 < t2) {
        return Err(Error::Domain(format!("grid needs nx, ny >= 2 and a proper region, got {nx}×{ny} on {:?}", region.0)));
    }
    let mut grid = SignGrid {
        function,
        region,
        nx,
        ny,
        re_sign: vec![0; nx * ny],
        im_sign: vec![0; nx * ny],
        mask: vec![false; nx * ny],
        bits: GRID_BITS,
        unit: vec![(0.0, 0.0); nx * ny],
    };
    let rows: Vec<Vec<Option<(i8, i8, (f64, f64))>>> = (0..ny)
        .into_par_iter()
        .map(|j| {
            (0..nx)
                .map(|i| {
                    let (x, y) = grid.node(i, j);
                    if function.masked(x, y) {
                        return None;
                    }
                    match node_value(function, x, y, ctx) {
                        Ok(v) => Some(v),
                        Err(e) => {
                            log::warn!("{} at {x} + {y}i failed ({e}); node masked", function.name());
                            None
                        }
                    }
                })
                .collect()
        })
        .collect();
    for (j, row) in rows.into_iter().enumerate() {
        for (i, v) in row.into_iter().enumerate() {
            let k = grid.index(i, j);
            match v {
                Some((r, im, u)) => {
                    grid.re_sign[k] = r;
                    grid.im_sign[k] = im;
                    grid.unit[k] = u;
                }
                None => grid.mask[k] = true,
            }
        }
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(128).unwrap()
    }

    #[test]
    fn lambda_negative_on_the_real_segment() {
        let g = sign_grid(XrayFunction::Lambda, Rect([0.5, 11.0, -1.0, 1.0]), 22, 3, &ctx()).unwrap();
        for i in 0..g.nx {
            let k = g.index(i, 1);
            assert_eq!(g.re_sign[k], -1, "sigma = {}", g.node(i, 1).0);
            assert_eq!(g.im_sign[k], 0);
        }
    }

    #[test]
    fn conjugate_symmetry() {
        let g = sign_grid(XrayFunction::Lambda, Rect([-3.0, 5.0, -4.0, 4.0]), 9, 9, &ctx()).unwrap();
        for j in 0..g.ny {
            for i in 0..g.nx {
                let (a, b) = (g.index(i, j), g.index(i, g.ny - 1 - j));
                assert_eq!(g.mask[a], g.mask[b]);
                if !g.mask[a] {
                    assert_eq!(g.re_sign[a], g.re_sign[b], "{:?}", g.node(i, j));
                    assert_eq!(g.im_sign[a], -g.im_sign[b]);
                }
            }
        }
        // the origin is masked
        assert!(g.mask[g.index(3, 4)]);
    }

    #[test]
    fn l_vanishes_at_minus_two() {
        let g = sign_grid(XrayFunction::L, Rect([-4.0, 0.0, -1.0, 1.0]), 5, 3, &ctx()).unwrap();
        let k = g.index(2, 1);
        assert_eq!(g.node(2, 1), (-2.0, 0.0));
        assert_eq!((g.re_sign[k], g.im_sign[k]), (0, 0));
        assert!(!g.mask[g.index(4, 1)]);
    }

    #[test]
    fn xi_is_real_on_the_line() {
        let v = XrayFunction::Xi.eval(&Complex::with_val(192, (0.5, 14.0)), 192).unwrap();
        assert!(Float::with_val(64, v.imag().abs_ref()) < Float::with_val(64, v.abs_ref()) * 1e-40);
    }
}
