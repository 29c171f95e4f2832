//! Zero counts against the empirical N(x) law, the γ-β relation, and the
//! half-plane check.

use std::f64::consts::PI;

use serde::Serialize;

use super::{ZeroRecord, B0_APPROX};
use crate::error::{Error, Result};

/// x/(4π) log(x/2π) - x/(4π) + sqrt of the same; the square root is taken of
/// max(0, ·) since the main term is negative for x < 2πe.
pub fn n_formula(x: f64) -> f64 {
    let m = x / (4.0 * PI) * (x / (2.0 * PI)).ln() - x / (4.0 * PI);
    m + m.max(0.0).sqrt()
}

#[derive(Clone, Debug, Serialize)]
pub struct NRow {
    pub x: f64,
    pub empirical: usize,
    pub formula: f64,
    pub r: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LawRow {
    pub n: i64,
    pub beta: f64,
    pub gamma: f64,
    /// γ - β log(β/4π)
    pub residual: f64,
    /// γ/log(γ/2π) >= 2β/π
    pub inequality: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ZeroStats {
    pub counts: Vec<NRow>,
    pub laws: Vec<LawRow>,
}

/// N(x) = #{n >= 0 : |b_n| <= x} against the formula on `x_grid`, and the γ-β
/// relations for every complex zero. `coverage` is the height up to which the
/// list is complete; since |b| >= Im b the count is exact for x <= coverage.
pub fn zero_stats(zeros: &[ZeroRecord], x_grid: &[f64], coverage: f64) -> Result<ZeroStats> {
    let mut counts = Vec::with_capacity(x_grid.len());
    for &x in x_grid {
        if x > coverage {
            return Err(Error::IncompleteAtlas { x, coverage });
        }
        let empirical = zeros.iter().filter(|z| z.n >= 0 && z.modulus() <= x).count();
        let formula = n_formula(x);
        counts.push(NRow {
            x,
            empirical,
            formula,
            r: empirical as f64 - formula,
        });
    }
    let laws = zeros
        .iter()
        .filter(|z| z.n > 0)
        .map(|z| {
            let (beta, gamma) = (z.beta(), z.gamma());
            LawRow {
                n: z.n,
                beta,
                gamma,
                residual: gamma - beta * (beta / (4.0 * PI)).ln(),
                inequality: gamma > 2.0 * PI && gamma / (gamma / (2.0 * PI)).ln() >= 2.0 * beta / PI,
            }
        })
        .collect();
    Ok(ZeroStats { counts, laws })
}

#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub n: i64,
    pub re: f64,
    pub im: f64,
    pub reason: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct HalfplaneReport {
    pub b0: f64,
    pub min_re: f64,
    pub violations: Vec<Violation>,
}

impl HalfplaneReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks Re b >= b₀ - 10⁻⁶ and that the stored zeros (n >= 0) lie in the
/// closed first quadrant, so their conjugates fill the fourth.
pub fn verify_halfplane(zeros: &[ZeroRecord]) -> HalfplaneReport {
    let b0 = zeros.iter().find(|z| z.n == 0).map_or(B0_APPROX, |z| z.beta());
    let mut violations = Vec::new();
    let mut min_re = f64::INFINITY;
    for z in zeros {
        let (re, im) = (z.beta(), z.gamma());
        min_re = min_re.min(re);
        if re < b0 - 1e-6 {
            violations.push(Violation {
                n: z.n,
                re,
                im,
                reason: "left of b0",
            });
        } else if z.n >= 0 && im < 0.0 {
            violations.push(Violation {
                n: z.n,
                re,
                im,
                reason: "stored zero below the real axis",
            });
        }
    }
    HalfplaneReport { b0, min_re, violations }
}
