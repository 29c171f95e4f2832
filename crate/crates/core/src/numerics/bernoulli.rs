use std::sync::{OnceLock, RwLock};

use rug::{Integer, Rational};

/// Cache of B_2, B_4, ..., stored at index k-1 for B_{2k}.
fn cache() -> &'static RwLock<Vec<Rational>> {
    static CACHE: OnceLock<RwLock<Vec<Rational>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(Vec::new()))
}

/// Even Bernoulli numbers B_2 ... B_{2n} from the tangent numbers
/// (integer-only recurrence, O(n^2) big-integer operations).
fn compute(n: usize) -> Vec<Rational> {
    let mut t = vec![Integer::new(); n + 1];
    if n == 0 {
        return Vec::new();
    }
    t[1] = Integer::from(1);
    for k in 2..=n {
        t[k] = Integer::from(&t[k - 1] * (k as u64 - 1));
    }
    for k in 2..=n {
        for j in k..=n {
            let a = Integer::from(&t[j - 1] * (j as u64 - k as u64));
            let b = Integer::from(&t[j] * (j as u64 - k as u64 + 2));
            t[j] = a + b;
        }
    }
    (1..=n)
        .map(|k| {
            let four_k = Integer::from(1) << (2 * k as u32);
            let den = Integer::from(&four_k - 1u32) * &four_k;
            let num = Integer::from(&t[k] * (2 * k as u64));
            let b = Rational::from((num, den));
            if k % 2 == 0 {
                -b
            } else {
                b
            }
        })
        .collect()
}

/// Runs `f` on a slice holding at least B_2 ... B_{2n}.
pub(crate) fn with_bernoulli<R>(n: usize, f: impl FnOnce(&[Rational]) -> R) -> R {
    {
        let guard = cache().read().expect("bernoulli cache poisoned");
        if guard.len() >= n {
            return f(&guard[..n]);
        }
    }
    let mut guard = cache().write().expect("bernoulli cache poisoned");
    if guard.len() < n {
        let target = n.max(2 * guard.len()).max(16);
        *guard = compute(target);
    }
    f(&guard[..n])
}

/// The Bernoulli number B_{2k}, k >= 1.
pub fn bernoulli_even(k: usize) -> Rational {
    assert!(k >= 1, "B_0 is not stored");
    with_bernoulli(k, |b| b[k - 1].clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(bernoulli_even(1), Rational::from((1, 6)));
        assert_eq!(bernoulli_even(2), Rational::from((-1, 30)));
        assert_eq!(bernoulli_even(3), Rational::from((1, 42)));
        assert_eq!(bernoulli_even(6), Rational::from((691, -2730)));
        assert_eq!(bernoulli_even(10), Rational::from((-174611, 330)));
        assert_eq!(bernoulli_even(12), Rational::from((-236364091, 2730)));
    }

    #[test]
    fn matches_zeta_formula() {
        // B_{2k} = (-1)^{k+1} 2 (2k)! zeta(2k) / (2 pi)^{2k}
        use rug::{float::Constant, ops::Pow, Float};
        let k = 40u32;
        let prec = 256;
        let two_pi = Float::with_val(prec, Constant::Pi) * 2u32;
        let fact = Float::with_val(prec, Float::factorial(2 * k));
        let zeta = Float::with_val(prec, 2 * k).zeta();
        let expected = Float::with_val(prec, 2u32 * fact * zeta / two_pi.pow(2 * k));
        let got = Float::with_val(prec, &bernoulli_even(k as usize));
        let rel = Float::with_val(prec, (got.clone() + &expected) / &expected).abs();
        assert!(rel < 1e-60, "{got} vs {expected}");
    }
}
