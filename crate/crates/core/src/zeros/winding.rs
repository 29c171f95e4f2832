//! Argument-principle zero counting for s·Λ(s) on axis-parallel rectangles.

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};
use std::sync::Mutex;

use rayon::prelude::*;
use rug::Complex;

use super::{s_lambda, Rect, SearchRegion};
use crate::error::{Error, Result};
use crate::numerics::log2_abs;

/// Sample coordinates are stored on a 2^-20 lattice.
const KEY_SCALE: f64 = (1u64 << 20) as f64;
/// Segments shorter than this are not split further.
const MIN_SEGMENT: f64 = 1.0 / 65536.0;
/// |sΛ| below 2^-40 on the contour counts as a zero on the boundary.
const BOUNDARY_LOG2: f64 = -40.0;
/// Precision used for phase samples.
pub(crate) const PHASE_BITS: u32 = 64;

#[derive(Clone, Copy, Debug)]
pub(crate) struct Sample {
    pub phase: f64,
    pub log2_abs: f64,
}

fn key(p: (f64, f64)) -> (i64, i64) {
    ((p.0 * KEY_SCALE).round() as i64, (p.1 * KEY_SCALE).round() as i64)
}

/// Memo of phase samples shared by every box of one scan.
#[derive(Default)]
pub struct PhaseCache {
    map: Mutex<HashMap<(i64, i64), Sample>>,
}

impl PhaseCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.lock().expect("phase cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn get(&self, p: (f64, f64)) -> Option<Sample> {
        self.map.lock().expect("phase cache poisoned").get(&key(p)).copied()
    }

    fn insert(&self, p: (f64, f64), s: Sample) {
        self.map.lock().expect("phase cache poisoned").insert(key(p), s);
    }

    pub(crate) fn sample(&self, p: (f64, f64)) -> Result<Sample> {
        if let Some(s) = self.get(p) {
            return Ok(s);
        }
        let s = evaluate(p)?;
        self.insert(p, s);
        Ok(s)
    }

    /// Evaluates the missing points in parallel.
    fn fill(&self, points: &[(f64, f64)]) -> Result<()> {
        let missing: Vec<(f64, f64)> = {
            let map = self.map.lock().expect("phase cache poisoned");
            let mut seen = std::collections::HashSet::new();
            points
                .iter()
                .copied()
                .filter(|p| !map.contains_key(&key(*p)) && seen.insert(key(*p)))
                .collect()
        };
        let results: Vec<Result<Sample>> = missing.par_iter().map(|&p| evaluate(p)).collect();
        for (p, r) in missing.into_iter().zip(results) {
            self.insert(p, r?);
        }
        Ok(())
    }
}

fn evaluate(p: (f64, f64)) -> Result<Sample> {
    let s = Complex::with_val(PHASE_BITS, p);
    let v = s_lambda(&s, PHASE_BITS)?;
    Ok(Sample {
        phase: v.imag().to_f64().atan2(v.real().to_f64()),
        log2_abs: log2_abs(&v),
    })
}

fn wrap(d: f64) -> f64 {
    let mut d = d % TAU;
    if d > PI {
        d -= TAU;
    } else if d <= -PI {
        d += TAU;
    }
    d
}

fn check_boundary(p: (f64, f64), s: &Sample) -> Result<()> {
    if s.log2_abs < BOUNDARY_LOG2 {
        return Err(Error::BoundaryZero {
            at: format!("{} + {}i", p.0, p.1),
        });
    }
    Ok(())
}

/// Phase increment from p to q, bisecting until every step is below π/2.
fn segment(cache: &PhaseCache, p: (f64, f64), q: (f64, f64)) -> Result<f64> {
    let a = cache.sample(p)?;
    let b = cache.sample(q)?;
    check_boundary(p, &a)?;
    check_boundary(q, &b)?;
    let d = wrap(b.phase - a.phase);
    if d.abs() < PI / 2.0 {
        return Ok(d);
    }
    let len = (q.0 - p.0).abs() + (q.1 - p.1).abs();
    if len <= MIN_SEGMENT {
        return Err(Error::BoundaryZero {
            at: format!("{} + {}i", p.0, p.1),
        });
    }
    let m = ((p.0 + q.0) / 2.0, (p.1 + q.1) / 2.0);
    Ok(segment(cache, p, m)? + segment(cache, m, q)?)
}

/// Base sample points of the edge a→b: the endpoints plus every multiple of
/// `step` strictly between them, so edges shared by neighbouring boxes use the
/// same samples.
fn edge_points(a: (f64, f64), b: (f64, f64), step: f64) -> Vec<(f64, f64)> {
    let horizontal = a.1 == b.1;
    let (lo, hi) = if horizontal { (a.0, b.0) } else { (a.1, b.1) };
    let (mn, mx) = (lo.min(hi), lo.max(hi));
    let mut inner = Vec::new();
    let mut k = (mn / step).floor() as i64 + 1;
    while (k as f64) * step < mx {
        let x = k as f64 * step;
        if x > mn {
            inner.push(x);
        }
        k += 1;
    }
    if hi < lo {
        inner.reverse();
    }
    let mut pts = vec![a];
    for x in inner {
        pts.push(if horizontal { (x, a.1) } else { (a.0, x) });
    }
    pts.push(b);
    pts
}

fn contour(rect: &Rect) -> [(f64, f64); 5] {
    let [s1, s2, t1, t2] = rect.0;
    [(s1, t1), (s2, t1), (s2, t2), (s1, t2), (s1, t1)]
}

/// Winding number of s·Λ(s) around `rect`, reusing samples in `cache`.
pub(crate) fn winding_cached(cache: &PhaseCache, rect: &Rect, step: f64) -> Result<i64> {
    let corners = contour(rect);
    let edges: Vec<Vec<(f64, f64)>> = corners.windows(2).map(|w| edge_points(w[0], w[1], step)).collect();
    let all: Vec<(f64, f64)> = edges.iter().flatten().copied().collect();
    cache.fill(&all)?;
    let mut total = 0.0;
    for pts in &edges {
        for w in pts.windows(2) {
            total += segment(cache, w[0], w[1])?;
        }
    }
    let turns = total / TAU;
    let n = turns.round();
    if (turns - n).abs() > 1e-3 {
        return Err(Error::NonClosure { turns });
    }
    Ok(n as i64)
}

/// Number of zeros of s·Λ(s) inside the region, with multiplicity.
pub fn winding_number(region: &SearchRegion) -> Result<i64> {
    let cache = PhaseCache::new();
    winding_cached(&cache, &region.rect, region.step)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_points_align_to_lattice() {
        let pts = edge_points((0.3, 1.0), (1.0, 1.0), 0.25);
        assert_eq!(pts, vec![(0.3, 1.0), (0.5, 1.0), (0.75, 1.0), (1.0, 1.0)]);
        let back = edge_points((1.0, 1.0), (0.3, 1.0), 0.25);
        assert_eq!(back, vec![(1.0, 1.0), (0.75, 1.0), (0.5, 1.0), (0.3, 1.0)]);
    }

    #[test]
    fn wrap_range() {
        assert!((wrap(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert!((wrap(-3.0 * PI / 2.0) - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn counts_on_small_boxes() {
        let w = |r: [f64; 4]| winding_number(&SearchRegion::new(Rect(r), 0.25).unwrap()).unwrap();
        assert_eq!(w([-2.0, 2.0, -2.0, 2.0]), 0);
        assert_eq!(w([10.0, 12.0, -1.0, 1.0]), 1);
        assert_eq!(w([0.0, 10.0, 0.0, 10.0]), 0);
    }
}
