//! Tiled scan for all zeros of s·Λ(s) up to a height.

use std::f64::consts::{E, FRAC_PI_2, PI};

use rayon::prelude::*;
use rug::Complex;

use super::refine::refine_in;
use super::winding::{winding_cached, PhaseCache};
use super::{default_step, Rect, ZeroRecord, B0_APPROX};
use crate::error::{Error, Result};
use crate::precision::PrecisionContext;

/// Scan parameters beyond the height.
#[derive(Clone, Debug)]
pub struct AtlasOptions {
    /// Base boundary step; `None` picks min(0.25, 1/log(2+t_max)).
    pub step: Option<f64>,
    /// Boxes holding one zero are bisected until both sides are at most this.
    pub leaf: f64,
    /// Lower edge of the scanned strip in t; the band below is covered by a
    /// separate count around b₀.
    pub t_floor: f64,
}

impl Default for AtlasOptions {
    fn default() -> Self {
        AtlasOptions {
            step: None,
            leaf: 0.25,
            t_floor: 0.5,
        }
    }
}

/// The zeros with 0 <= Im b <= coverage: b₀ first, then b_1, b_2, ... by modulus.
#[derive(Clone, Debug)]
pub struct ZeroAtlas {
    pub zeros: Vec<ZeroRecord>,
    /// Height up to which the list is complete.
    pub coverage: f64,
    /// Winding count of the last scanned region and the number of zeros found in it.
    pub region: Option<(Rect, i64, usize)>,
}

impl ZeroAtlas {
    pub fn b0(&self) -> Option<&ZeroRecord> {
        self.zeros.iter().find(|z| z.n == 0)
    }

    /// Zeros in the upper half plane (n >= 1).
    pub fn complex_zeros(&self) -> impl Iterator<Item = &ZeroRecord> {
        self.zeros.iter().filter(|z| z.n > 0)
    }

    /// Scans up to `t_max`, reusing `existing` below its coverage.
    pub fn extend(existing: Option<ZeroAtlas>, t_max: f64, opts: &AtlasOptions, ctx: &PrecisionContext) -> Result<ZeroAtlas> {
        if !(t_max >= 0.0) {
            return Err(Error::Domain(format!("t_max must be non-negative, got {t_max}")));
        }
        if let Some(ex) = &existing {
            if ex.coverage >= t_max {
                let mut zeros: Vec<ZeroRecord> = ex.zeros.iter().filter(|z| z.gamma() <= t_max).cloned().collect();
                number(&mut zeros);
                return Ok(ZeroAtlas {
                    zeros,
                    coverage: t_max,
                    region: None,
                });
            }
        }
        let step = opts.step.unwrap_or_else(|| default_step(t_max));
        let cache = PhaseCache::new();
        let b0 = match existing.as_ref().and_then(|e| e.b0().cloned()) {
            Some(b) => b,
            None => real_zero(&cache, ctx)?,
        };
        let sigma_left = snap_down(b0.beta() - 1.0, step);
        let mut sigma_right = snap_up(sigma_bound(t_max), step);

        let mut zeros: Vec<ZeroRecord> = match &existing {
            Some(e) => e.zeros.clone(),
            None => vec![b0.clone()],
        };
        let fresh = existing.is_none();
        let t_lo = match &existing {
            Some(e) => snap_down(e.coverage, step).max(opts.t_floor),
            None => opts.t_floor,
        };

        if fresh {
            // nothing but b₀ in the band |t| <= t_floor
            let band = Rect([sigma_left, sigma_right, -opts.t_floor, opts.t_floor]);
            let c = winding_cached(&cache, &band, step)?;
            if c != 1 {
                return Err(Error::SuspectedMissedZero {
                    bounds: band.0,
                    parent: 1,
                    children: c,
                });
            }
        }
        if t_max <= t_lo && fresh {
            number(&mut zeros);
            return Ok(ZeroAtlas {
                zeros,
                coverage: t_max,
                region: None,
            });
        }

        let mut t_hi = snap_up(t_max, step).max(t_lo + step);
        // right edge check on a box 1.5 times wider
        let mut widen = 0;
        let (region, count) = loop {
            let rect = Rect([sigma_left, sigma_right, t_lo, t_hi]);
            let count = match winding_cached(&cache, &rect, step) {
                Ok(c) => c,
                Err(Error::BoundaryZero { .. }) => {
                    t_hi += step;
                    continue;
                }
                Err(e) => return Err(e),
            };
            let outer = Rect([sigma_right, snap_up(1.5 * sigma_right, step), t_lo, t_hi]);
            let beyond = winding_cached(&cache, &outer, step)?;
            if beyond == 0 {
                break (rect, count);
            }
            widen += 1;
            log::warn!("{beyond} zeros beyond the right edge {sigma_right}; widening");
            if widen > 3 {
                return Err(Error::SuspectedMissedZero {
                    bounds: outer.0,
                    parent: 0,
                    children: beyond,
                });
            }
            sigma_right = outer.0[1];
        };
        log::info!("region {:?} holds {count} zeros", region.0);

        let leaves = bisect(&cache, region, count, step, opts.leaf)?;
        let found: Vec<Result<ZeroRecord>> = leaves
            .par_iter()
            .map(|leaf| {
                let [s1, s2, t1, t2] = leaf.0;
                let seed = Complex::with_val(64, ((s1 + s2) / 2.0, (t1 + t2) / 2.0));
                let pad = leaf.width().max(leaf.height()) / 2.0;
                let trust = Rect([s1 - pad, s2 + pad, t1 - pad, t2 + pad]);
                let cert = (leaf.width().min(leaf.height()) / 4.0).min(1.0 / 16.0);
                let rec = refine_in(&seed, &trust, cert, &PhaseCache::new(), ctx)?;
                let tol = 1e-9;
                if !Rect([s1 - tol, s2 + tol, t1 - tol, t2 + tol]).contains(rec.beta(), rec.gamma()) {
                    return Err(Error::Divergence {
                        seed: format!("{} + {}i", seed.real().to_f64(), seed.imag().to_f64()),
                        bounds: leaf.0,
                    });
                }
                Ok(rec)
            })
            .collect();
        let mut new: Vec<ZeroRecord> = Vec::with_capacity(found.len());
        for r in found {
            new.push(r?);
        }
        let n_found = new.len();
        for rec in new {
            if rec.gamma() > t_max {
                continue;
            }
            let dup = zeros.iter().any(|z| {
                let d = Complex::with_val(64, &z.b - &rec.b);
                d.abs().real().to_f64() < 1e-6
            });
            if !dup {
                zeros.push(rec);
            }
        }
        number(&mut zeros);
        Ok(ZeroAtlas {
            zeros,
            coverage: t_max,
            region: Some((region, count, n_found)),
        })
    }
}

/// All zeros with 0 < Im b <= t_max plus b₀, ordered by modulus.
pub fn enumerate_zeros(t_max: f64, ctx: &PrecisionContext) -> Result<Vec<ZeroRecord>> {
    Ok(ZeroAtlas::extend(None, t_max, &AtlasOptions::default(), ctx)?.zeros)
}

/// Right edge of the search: 1.5 times the β allowed by γ/log(γ/2π) >= 2β/π
/// at γ = t (the left side is smallest at γ = 2πe, which is used below it).
pub fn sigma_bound(t: f64) -> f64 {
    let g = t.max(2.0 * PI * E);
    1.5 * FRAC_PI_2 * g / (g / (2.0 * PI)).ln()
}

fn snap_down(x: f64, step: f64) -> f64 {
    (x / step).floor() * step
}

fn snap_up(x: f64, step: f64) -> f64 {
    (x / step).ceil() * step
}

/// b₀ from a Newton refinement on the real axis.
fn real_zero(cache: &PhaseCache, ctx: &PrecisionContext) -> Result<ZeroRecord> {
    let seed = Complex::with_val(64, (B0_APPROX, 0.0));
    let trust = Rect([10.5, 12.0, -0.5, 0.5]);
    let mut rec = refine_in(&seed, &trust, 1.0 / 16.0, cache, ctx)?;
    rec.n = 0;
    Ok(rec)
}

/// Splits a side at its midpoint, rounded to the boundary lattice when the
/// side is long enough.
fn split_point(lo: f64, hi: f64, step: f64, shift: u32) -> f64 {
    let mid = (lo + hi) / 2.0;
    let unit = if hi - lo > 4.0 * step { step } else { (hi - lo) / 4.0 };
    let base = (mid / unit).round() * unit;
    // successive retries move the cut by half a unit to either side
    let k = f64::from(shift.div_ceil(2)) * if shift % 2 == 1 { 0.5 } else { -0.5 };
    base + k * unit
}

/// Bisects boxes until every remaining box holds exactly one zero and is no
/// larger than `leaf`; the two children must account for the parent count.
fn bisect(cache: &PhaseCache, root: Rect, count: i64, step: f64, leaf: f64) -> Result<Vec<Rect>> {
    let mut stack = vec![(root, count)];
    let mut leaves = Vec::new();
    while let Some((rect, c)) = stack.pop() {
        if c == 0 {
            continue;
        }
        if c < 0 {
            return Err(Error::SuspectedMissedZero {
                bounds: rect.0,
                parent: c,
                children: 0,
            });
        }
        if c == 1 && rect.width() <= leaf && rect.height() <= leaf {
            leaves.push(rect);
            continue;
        }
        if rect.width().max(rect.height()) < 1e-4 {
            return Err(Error::SuspectedMissedZero {
                bounds: rect.0,
                parent: c,
                children: 1,
            });
        }
        let [s1, s2, t1, t2] = rect.0;
        let vertical_cut = rect.width() >= rect.height();
        let mut shift = 0u32;
        let (a, b, ca, cb) = loop {
            let (a, b) = if vertical_cut {
                let m = split_point(s1, s2, step, shift);
                (Rect([s1, m, t1, t2]), Rect([m, s2, t1, t2]))
            } else {
                let m = split_point(t1, t2, step, shift);
                (Rect([s1, s2, t1, m]), Rect([s1, s2, m, t2]))
            };
            let counts = winding_cached(cache, &a, step).and_then(|ca| Ok((ca, winding_cached(cache, &b, step)?)));
            match counts {
                Ok((ca, cb)) => break (a, b, ca, cb),
                Err(Error::BoundaryZero { at }) if shift < 6 => {
                    log::debug!("zero on the cut near {at}; moving the cut");
                    shift += 1;
                }
                Err(e) => return Err(e),
            }
        };
        if ca + cb != c {
            return Err(Error::SuspectedMissedZero {
                bounds: rect.0,
                parent: c,
                children: ca + cb,
            });
        }
        stack.push((a, ca));
        stack.push((b, cb));
    }
    Ok(leaves)
}

/// Sorts by modulus (ties by Im b) and assigns indices, b₀ = 0.
fn number(zeros: &mut [ZeroRecord]) {
    zeros.sort_by(|x, y| {
        let kx = (x.gamma() != 0.0, x.modulus(), x.gamma());
        let ky = (y.gamma() != 0.0, y.modulus(), y.gamma());
        kx.partial_cmp(&ky).expect("finite zeros")
    });
    for (i, z) in zeros.iter_mut().enumerate() {
        z.n = i as i64;
    }
}
