use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Working precision and truncation tolerance threaded through every evaluation.
///
/// `eps` is kept as a base-2 exponent because the tolerances in play
/// (2^-1400 and below) do not fit in an `f64`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrecisionContext {
    bits: u32,
    eps_log2: f64,
    max_terms: usize,
}

impl PrecisionContext {
    pub const MIN_BITS: u32 = 64;
    pub const DEFAULT_BITS: u32 = 128;
    pub const DEFAULT_MAX_TERMS: usize = 2_000_000;

    /// Context with `eps = 2^(8 - bits)`.
    pub fn new(bits: u32) -> Result<Self> {
        if bits < Self::MIN_BITS {
            return Err(Error::Domain(format!(
                "precision must be at least {} bits, got {bits}",
                Self::MIN_BITS
            )));
        }
        Ok(PrecisionContext {
            bits,
            eps_log2: 8.0 - f64::from(bits),
            max_terms: Self::DEFAULT_MAX_TERMS,
        })
    }

    /// Same as [`PrecisionContext::new`] for precisions known to be valid.
    pub fn with_bits_unchecked(bits: u32) -> Self {
        Self::new(bits.max(Self::MIN_BITS)).expect("bits clamped to minimum")
    }

    pub fn with_eps_log2(mut self, eps_log2: f64) -> Result<Self> {
        if !(eps_log2 < -32.0) || eps_log2 < -f64::from(self.bits) {
            return Err(Error::Domain(format!(
                "eps = 2^{eps_log2} must lie in [2^-{}, 2^-32)",
                self.bits
            )));
        }
        self.eps_log2 = eps_log2;
        Ok(self)
    }

    /// Parses a decimal tolerance such as `1e-30`.
    pub fn with_eps_str(self, eps: &str) -> Result<Self> {
        let parsed = Float::parse(eps)
            .map_err(|e| Error::Domain(format!("cannot parse eps {eps:?}: {e}")))?;
        let value = Float::with_val(64, parsed);
        if !(value.is_finite() && value > 0) {
            return Err(Error::Domain(format!("eps must be positive, got {eps}")));
        }
        let log2 = value.log2().to_f64();
        self.with_eps_log2(log2)
    }

    pub fn with_max_terms(mut self, max_terms: usize) -> Self {
        self.max_terms = max_terms.max(1);
        self
    }

    /// Context at a different precision, keeping the gap between eps and 2^-bits.
    pub fn with_bits(&self, bits: u32) -> Self {
        let bits = bits.max(Self::MIN_BITS);
        let shift = f64::from(bits) - f64::from(self.bits);
        PrecisionContext {
            bits,
            eps_log2: (self.eps_log2 - shift).min(-33.0),
            max_terms: self.max_terms,
        }
    }

    /// Context raised to at least `bits`.
    pub fn at_least(&self, bits: u32) -> Self {
        if bits > self.bits {
            self.with_bits(bits)
        } else {
            self.clone()
        }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn eps_log2(&self) -> f64 {
        self.eps_log2
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }

    pub fn eps(&self) -> Float {
        let mut e = Float::with_val(64, 1);
        e <<= self.eps_log2.floor() as i32;
        e * Float::with_val(64, (self.eps_log2 - self.eps_log2.floor()).exp2())
    }

    /// Precision for intermediate values, `bits + guard`.
    pub fn wp(&self, guard: u32) -> u32 {
        self.bits + guard
    }
}

impl Default for PrecisionContext {
    fn default() -> Self {
        Self::new(Self::DEFAULT_BITS).expect("default precision is valid")
    }
}
