//! Marching squares on a [`SignGrid`], chaining into polylines, and secant
//! polishing of the vertices.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use rug::{Complex, Float};
use serde::Serialize;

use super::{node_value, SignGrid, XrayFunction};
use crate::error::Result;
use crate::precision::PrecisionContext;

/// Which level set a curve belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveKind {
    /// Im f = 0, drawn thick.
    Real,
    /// Re f = 0, drawn thin.
    Imaginary,
}

impl CurveKind {
    pub fn name(self) -> &'static str {
        match self {
            CurveKind::Real => "real",
            CurveKind::Imaginary => "imaginary",
        }
    }

    /// The component that vanishes on the curve.
    fn component(self, v: &Complex) -> &Float {
        match self {
            CurveKind::Real => v.imag(),
            CurveKind::Imaginary => v.real(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct XRayCurve {
    pub kind: CurveKind,
    pub points: Vec<Complex>,
    pub refined: bool,
    pub closed: bool,
}

/// Edge ids: 2k for the edge from node k to its right neighbour, 2k+1 for
/// the edge from node k to the node above.
type EdgeId = usize;

struct Field<'a> {
    g: &'a SignGrid,
    kind: CurveKind,
}

impl Field<'_> {
    fn positive(&self, k: usize) -> bool {
        let s = match self.kind {
            CurveKind::Real => self.g.im_sign[k],
            CurveKind::Imaginary => self.g.re_sign[k],
        };
        s >= 0
    }

    fn value(&self, k: usize) -> f64 {
        let u = self.g.unit[k];
        match self.kind {
            CurveKind::Real => u.1,
            CurveKind::Imaginary => u.0,
        }
    }

    fn endpoints(&self, e: EdgeId) -> (usize, usize) {
        let k = e / 2;
        if e.is_multiple_of(2) {
            (k, k + 1)
        } else {
            (k, k + self.g.nx)
        }
    }

    /// Linear interpolation of the crossing on an edge.
    fn crossing(&self, e: EdgeId) -> (f64, f64) {
        let (a, b) = self.endpoints(e);
        let (va, vb) = (self.value(a), self.value(b));
        let frac = if va == vb { 0.5 } else { (va / (va - vb)).clamp(0.0, 1.0) };
        let (i, j) = (a % self.g.nx, a / self.g.nx);
        let (x0, y0) = self.g.node(i, j);
        if e.is_multiple_of(2) {
            (x0 + frac * self.g.cell_width(), y0)
        } else {
            (x0, y0 + frac * self.g.cell_height())
        }
    }
}

/// Segments of one level set, each joining two edge crossings.
fn segments(field: &Field, ctx: &PrecisionContext) -> Vec<(EdgeId, EdgeId)> {
    let g = field.g;
    let mut out = Vec::new();
    for j in 0..g.ny - 1 {
        for i in 0..g.nx - 1 {
            let a = g.index(i, j);
            let b = a + 1;
            let c = b + g.nx;
            let d = a + g.nx;
            if [a, b, c, d].iter().any(|&k| g.mask[k]) {
                continue;
            }
            let (x0, y0) = g.node(i, j);
            let (x1, y1) = g.node(i + 1, j + 1);
            if g.function.cell_masked(x0, x1, y0, y1) {
                continue;
            }
            let (pa, pb, pc, pd) = (field.positive(a), field.positive(b), field.positive(c), field.positive(d));
            let bottom = 2 * a;
            let top = 2 * d;
            let left = 2 * a + 1;
            let right = 2 * b + 1;
            let mut crossed = Vec::with_capacity(4);
            if pa != pb {
                crossed.push(bottom);
            }
            if pb != pc {
                crossed.push(right);
            }
            if pd != pc {
                crossed.push(top);
            }
            if pa != pd {
                crossed.push(left);
            }
            match crossed.len() {
                2 => out.push((crossed[0], crossed[1])),
                4 => {
                    // saddle: the centre decides which corners connect
                    let (x, y) = g.node(i, j);
                    let (x, y) = (x + g.cell_width() / 2.0, y + g.cell_height() / 2.0);
                    let centre = node_value(g.function, x, y, ctx)
                        .map(|(r, im, _)| match field.kind {
                            CurveKind::Real => im >= 0,
                            CurveKind::Imaginary => r >= 0,
                        })
                        .unwrap_or(pa);
                    if centre == pa {
                        out.push((bottom, right));
                        out.push((top, left));
                    } else {
                        out.push((bottom, left));
                        out.push((right, top));
                    }
                }
                _ => {}
            }
        }
    }
    out
}

/// Chains segments sharing an edge into polylines of edge ids.
fn chain(segs: &[(EdgeId, EdgeId)]) -> Vec<(Vec<EdgeId>, bool)> {
    let mut at: HashMap<EdgeId, Vec<usize>> = HashMap::new();
    for (n, &(a, b)) in segs.iter().enumerate() {
        at.entry(a).or_default().push(n);
        at.entry(b).or_default().push(n);
    }
    let mut used = vec![false; segs.len()];
    let mut out = Vec::new();
    let walk = |start: usize, from: EdgeId, used: &mut Vec<bool>| -> (Vec<EdgeId>, bool) {
        let mut path = vec![from];
        let mut seg = start;
        let mut cur = from;
        loop {
            used[seg] = true;
            let (a, b) = segs[seg];
            let next = if a == cur { b } else { a };
            if next == from {
                return (path, true);
            }
            path.push(next);
            cur = next;
            match at[&cur].iter().find(|&&s| !used[s]) {
                Some(&s) => seg = s,
                None => return (path, false),
            }
        }
    };
    // open chains start at edges used by one segment only
    let mut ends: Vec<EdgeId> = at.iter().filter(|(_, v)| v.len() == 1).map(|(e, _)| *e).collect();
    ends.sort_unstable();
    for e in ends {
        let s = at[&e][0];
        if !used[s] {
            out.push(walk(s, e, &mut used));
        }
    }
    for s in 0..segs.len() {
        if !used[s] {
            out.push(walk(s, segs[s].0, &mut used));
        }
    }
    out
}

/// Polishes the crossing on edge `e` by regula falsi (Illinois variant) on the
/// vanishing component, at the precision that resolves it.
fn polish(field: &Field, e: EdgeId, guess: (f64, f64), ctx: &PrecisionContext) -> Complex {
    let g = field.g;
    let (a, _) = field.endpoints(e);
    let (x0, y0) = g.node(a % g.nx, a / g.nx);
    let horizontal = e.is_multiple_of(2);
    let len = if horizontal { g.cell_width() } else { g.cell_height() };
    let wp = g.function.fine_bits(y0.abs().max((y0 + len).abs()), ctx);
    let point = |u: &Float| -> Complex {
        if horizontal {
            Complex::with_val(wp, (Float::with_val(wp, u + x0), Float::with_val(wp, y0)))
        } else {
            Complex::with_val(wp, (Float::with_val(wp, x0), Float::with_val(wp, u + y0)))
        }
    };
    let fallback = Complex::with_val(wp, guess);
    let comp = |u: &Float| -> Option<(Float, Float)> {
        let v = g.function.eval(&point(u), wp).ok()?;
        Some((field.kind.component(&v).clone(), Float::with_val(wp, v.abs_ref())))
    };
    let mut lo = Float::with_val(wp, 0);
    let mut hi = Float::with_val(wp, len);
    let (Some((mut flo, _)), Some((mut fhi, _))) = (comp(&lo), comp(&hi)) else {
        return fallback;
    };
    if flo.is_zero() {
        return point(&lo);
    }
    if fhi.is_zero() {
        return point(&hi);
    }
    if flo.is_sign_negative() == fhi.is_sign_negative() {
        return fallback;
    }
    let target = -f64::from(ctx.bits()) + 8.0;
    let mut side = 0i8;
    let mut best = point(&Float::with_val(wp, if horizontal { guess.0 - x0 } else { guess.1 - y0 }));
    for _ in 0..200 {
        let denom = Float::with_val(wp, &fhi - &flo);
        let mut u = Float::with_val(wp, &lo * &fhi) - Float::with_val(wp, &hi * &flo);
        u /= &denom;
        if !(u > lo && u < hi) {
            u = Float::with_val(wp, &lo + &hi) / 2u32;
        }
        let Some((fu, m)) = comp(&u) else { break };
        best = point(&u);
        let rel = if m.is_zero() { f64::NEG_INFINITY } else { (Float::with_val(64, fu.abs_ref()) / &m).log2().to_f64() };
        let width = Float::with_val(64, &hi - &lo).to_f64();
        if rel < target || fu.is_zero() || width < len * (-f64::from(ctx.bits())).exp2() {
            break;
        }
        if fu.is_sign_negative() == flo.is_sign_negative() {
            lo = u;
            flo = fu;
            if side == -1 {
                fhi /= 2u32;
            }
            side = -1;
        } else {
            hi = u;
            fhi = fu;
            if side == 1 {
                flo /= 2u32;
            }
            side = 1;
        }
    }
    best
}

/// Traces both level sets of `grid`; with `refine` every vertex is polished
/// along its grid edge at working precision.
pub fn extract_curves(grid: &SignGrid, refine: bool, ctx: &PrecisionContext) -> Result<Vec<XRayCurve>> {
    let mut curves = Vec::new();
    for kind in [CurveKind::Real, CurveKind::Imaginary] {
        let field = Field { g: grid, kind };
        let segs = segments(&field, ctx);
        let chains = chain(&segs);
        let mut positions: BTreeMap<EdgeId, Complex> = BTreeMap::new();
        let mut edges: Vec<EdgeId> = chains.iter().flat_map(|(p, _)| p.iter().copied()).collect();
        edges.sort_unstable();
        edges.dedup();
        let located: Vec<(EdgeId, Complex)> = if refine {
            edges
                .par_iter()
                .map(|&e| (e, polish(&field, e, field.crossing(e), ctx)))
                .collect()
        } else {
            edges
                .iter()
                .map(|&e| (e, Complex::with_val(grid.bits, field.crossing(e))))
                .collect()
        };
        positions.extend(located);
        for (path, closed) in chains {
            curves.push(XRayCurve {
                kind,
                points: path.iter().map(|e| positions[e].clone()).collect(),
                refined: refine,
                closed,
            });
        }
    }
    Ok(curves)
}

/// Ordinates in [t_lo, t_hi] where curves of `kind` cross the vertical line
/// σ = sigma0, polished by regula falsi along the line.
pub fn line_crossings(
    curves: &[XRayCurve],
    kind: CurveKind,
    function: XrayFunction,
    sigma0: f64,
    t_lo: f64,
    t_hi: f64,
    ctx: &PrecisionContext,
) -> Vec<f64> {
    let mut brackets = Vec::new();
    for c in curves.iter().filter(|c| c.kind == kind) {
        let pts: Vec<(f64, f64)> = c.points.iter().map(|p| (p.real().to_f64() - sigma0, p.imag().to_f64())).collect();
        for (k, &(d, t)) in pts.iter().enumerate() {
            if d == 0.0 {
                brackets.push((t, t));
            } else if let Some(&(d1, t1)) = pts.get(k + 1) {
                if d1 != 0.0 && (d < 0.0) != (d1 < 0.0) {
                    brackets.push((t.min(t1), t.max(t1)));
                }
            }
        }
    }
    let mut out: Vec<f64> = brackets
        .into_iter()
        .filter(|(a, b)| *b >= t_lo && *a <= t_hi)
        .map(|(a, b)| polish_on_line(function, kind, sigma0, a, b, ctx))
        .filter(|t| *t >= t_lo && *t <= t_hi)
        .collect();
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    out
}

fn polish_on_line(function: XrayFunction, kind: CurveKind, sigma0: f64, a: f64, b: f64, ctx: &PrecisionContext) -> f64 {
    let wp = function.fine_bits(a.abs().max(b.abs()), ctx);
    let comp = |t: f64| -> Option<f64> {
        let v = function.eval(&Complex::with_val(wp, (sigma0, t)), wp).ok()?;
        let m = Float::with_val(64, v.abs_ref());
        Some(Float::with_val(64, kind.component(&v) / &m).to_f64())
    };
    // the polyline only locates the crossing to within a cell; widen until
    // the component changes sign along the line
    let (mut lo, mut hi) = (a, b);
    let pad = (b - a).max(0.05);
    let mut bracket = None;
    for k in 0..4 {
        let w = if a == b { pad * f64::from(k + 1) } else { pad * f64::from(k) };
        let (l, h) = (a - w, b + w);
        if let (Some(fl), Some(fh)) = (comp(l), comp(h)) {
            if (fl < 0.0) != (fh < 0.0) {
                bracket = Some((fl, fh));
                (lo, hi) = (l, h);
                break;
            }
        }
    }
    let Some((mut fa, mut fb)) = bracket else {
        return (a + b) / 2.0;
    };
    let mut side = 0i8;
    for _ in 0..100 {
        let mut u = (lo * fb - hi * fa) / (fb - fa);
        if !(u > lo && u < hi) {
            u = (lo + hi) / 2.0;
        }
        let Some(fu) = comp(u) else { break };
        if fu == 0.0 || hi - lo < 1e-14 * hi.abs().max(1.0) {
            return u;
        }
        if (fu < 0.0) == (fa < 0.0) {
            lo = u;
            fa = fu;
            if side == -1 {
                fb /= 2.0;
            }
            side = -1;
        } else {
            hi = u;
            fb = fu;
            if side == 1 {
                fa /= 2.0;
            }
            side = 1;
        }
    }
    (lo + hi) / 2.0
}

#[cfg(test)]
mod tests {
    use super::super::sign_grid;
    use super::*;
    use crate::zeros::Rect;

    #[test]
    fn identity_has_one_curve_of_each_kind() {
        let ctx = PrecisionContext::new(64).unwrap();
        for (nx, ny) in [(5, 5), (8, 11)] {
            let g = sign_grid(XrayFunction::Identity, Rect([-2.0, 2.0, -2.0, 2.0]), nx, ny, &ctx).unwrap();
            let curves = extract_curves(&g, true, &ctx).unwrap();
            let real: Vec<_> = curves.iter().filter(|c| c.kind == CurveKind::Real).collect();
            let imag: Vec<_> = curves.iter().filter(|c| c.kind == CurveKind::Imaginary).collect();
            assert_eq!(real.len(), 1, "{nx}x{ny}");
            assert_eq!(imag.len(), 1, "{nx}x{ny}");
            for p in &real[0].points {
                assert!(p.imag().clone().abs() < 1e-15);
            }
            for p in &imag[0].points {
                assert!(p.real().clone().abs() < 1e-15);
            }
        }
    }

    #[test]
    fn loop_closes() {
        let segs = vec![(0, 1), (1, 2), (2, 3), (3, 0)];
        let c = chain(&segs);
        assert_eq!(c.len(), 1);
        assert!(c[0].1);
        assert_eq!(c[0].0.len(), 4);
    }
}
