//! Exact comparisons between products of integer powers.
//!
//! Thresholds such as `r >= n^θ` with `θ = num/den` are decided as
//! `r^den >= n^num`. A logarithmic comparison settles almost every case; only
//! near-ties fall through to big-integer arithmetic, so every decision is
//! exact.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_traits::One;

/// Relative gap below which the log comparison is not trusted.
const LOG_TIE_MARGIN: f64 = 1e-9;

/// A product of integer powers `∏ base^exp`.
pub type PowerProduct<'a> = &'a [(u64, u32)];

fn log_of(product: PowerProduct<'_>) -> f64 {
    product
        .iter()
        .map(|&(b, e)| e as f64 * (b as f64).ln())
        .sum()
}

fn exact_value(product: PowerProduct<'_>) -> BigUint {
    let mut acc = BigUint::one();
    for &(b, e) in product {
        acc *= BigUint::from(b).pow(e);
    }
    acc
}

/// Compares two products of powers. Bases must be nonzero.
pub fn cmp_products(lhs: PowerProduct<'_>, rhs: PowerProduct<'_>) -> Ordering {
    debug_assert!(lhs.iter().chain(rhs).all(|&(b, _)| b > 0));
    let (l, r) = (log_of(lhs), log_of(rhs));
    let scale = l.abs().max(r.abs()).max(1.0);
    if l - r > LOG_TIE_MARGIN * scale {
        Ordering::Greater
    } else if r - l > LOG_TIE_MARGIN * scale {
        Ordering::Less
    } else {
        exact_value(lhs).cmp(&exact_value(rhs))
    }
}

/// Compares `a^ea` with `b^eb`.
#[inline]
pub fn cmp_powers(a: u64, ea: u32, b: u64, eb: u32) -> Ordering {
    cmp_products(&[(a, ea)], &[(b, eb)])
}

/// Largest `m >= 0` with `holds(m)`, for a predicate that is true on an
/// initial segment of the naturals and includes 0. `estimate` only seeds the
/// search.
pub fn largest_where(estimate: f64, holds: impl Fn(u64) -> bool) -> u64 {
    let mut m = if estimate.is_finite() && estimate > 0.0 {
        estimate.floor().min(u64::MAX as f64 / 2.0) as u64
    } else {
        0
    };
    while m > 0 && !holds(m) {
        m -= 1;
    }
    while holds(m + 1) {
        m += 1;
    }
    m
}

/// `⌊x^(1/k)⌋`.
pub fn floor_root(x: u64, k: u32) -> u64 {
    assert!(k >= 1);
    if k == 1 || x < 2 {
        return x;
    }
    largest_where((x as f64).powf(1.0 / k as f64), |m| {
        m == 0 || cmp_powers(m, k, x, 1) != Ordering::Greater
    })
}

/// `⌊√n⌋`.
#[inline]
pub fn isqrt(n: u64) -> u64 {
    floor_root(n, 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tie_is_resolved_exactly() {
        assert_eq!(cmp_powers(5, 2, 25, 1), Ordering::Equal);
        assert_eq!(cmp_powers(2, 4, 9, 1), Ordering::Greater);
        assert_eq!(cmp_powers(2, 4, 21, 1), Ordering::Less);
        // 3^40 vs 9^20 + nothing: identical values with large exponents
        assert_eq!(cmp_powers(3, 40, 9, 20), Ordering::Equal);
        // 10^18 + 1 is not a perfect square of 10^9
        assert_eq!(cmp_powers(1_000_000_000, 2, 1_000_000_000_000_000_001, 1), Ordering::Less);
    }

    #[test]
    fn roots() {
        assert_eq!(floor_root(10_000, 2), 100);
        assert_eq!(floor_root(9_999, 2), 99);
        assert_eq!(floor_root(1_000_000, 3), 100);
        assert_eq!(floor_root(999_999, 3), 99);
        assert_eq!(floor_root(1, 5), 1);
        assert_eq!(floor_root(0, 3), 0);
        assert_eq!(floor_root(u64::MAX, 2), 4_294_967_295);
        assert_eq!(isqrt(35), 5);
    }
}
