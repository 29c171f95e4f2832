//! f64 bounds used to size truncations. All results are natural logs.

/// ln of an upper bound for ∫_1^∞ x^p e^{-cx} dx (c > 0); +inf when the
/// simple bound does not apply yet.
pub(crate) fn ln_tail_unit(p: f64, c: f64) -> f64 {
    if c <= 0.0 {
        return f64::INFINITY;
    }
    if p <= 0.0 {
        -c - c.ln()
    } else if c > p {
        // p ln x <= p (x - 1)
        -c - (c - p).ln()
    } else {
        f64::INFINITY
    }
}

/// ln of an upper bound for ∫_X^∞ x^p e^{-ax} dx.
pub(crate) fn ln_tail_from(p: f64, a: f64, x: f64) -> f64 {
    (p + 1.0) * x.ln() + ln_tail_unit(p, a * x)
}

/// ln of the envelope e^{-πy} / (1 - e^{-πy}) >= Σ_{n>=1} |e^{-πn²w}| for Re w >= y > 0.
pub(crate) fn ln_psi_envelope(y: f64) -> f64 {
    let e = -std::f64::consts::PI * y;
    e - (-e.exp_m1()).ln()
}

/// Smallest X >= 1 with ln_tail_from(p, a, X) + ln_c(X) <= target, where the
/// envelope constant ln_c is 1/(1 - e^{-aX}) style and passed as a closure.
pub(crate) fn solve_cutoff(p: f64, a: f64, target: f64, extra: impl Fn(f64) -> f64) -> f64 {
    let ok = |x: f64| ln_tail_from(p, a, x) + extra(x) <= target;
    let mut hi = 1.0f64;
    while !ok(hi) {
        hi *= 2.0;
        if hi > 1e12 {
            return hi;
        }
    }
    if hi == 1.0 {
        return 1.0;
    }
    let mut lo = hi / 2.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}
