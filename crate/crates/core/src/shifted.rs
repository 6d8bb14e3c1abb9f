//! Counting primes whose shifts `p − 1` carry a large prime factor.
//!
//! `θ` is always a reduced fraction and every threshold `r >= n^θ` is decided
//! exactly as `r^den >= n^num`.
//!
//! [`t_k_theta_oracle`] enumerates ordered prime tuples directly.
//! [`t_k_theta_fast`] instead fixes the prime `r` that must be the largest
//! prime factor of `gcd(p₁−1, …, p_k−1)`: all `pᵢ` then lie in the progression
//! `1 mod r`, and the threshold becomes a plain cap on the product. Each
//! qualifying tuple has exactly one such `r`, so nothing is counted twice.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{cmp_powers, floor_root, largest_where};
use crate::primes::{PrimeTables, SieveCache};

/// Default node budget for [`t_k_theta_oracle`].
pub const DEFAULT_NODE_BUDGET: u64 = 1_000_000_000;

const COUNT_BLOCK: u64 = 1 << 16;

/// An exponent `θ = num/den` in lowest terms with `0 < θ < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Theta {
    num: u32,
    den: u32,
}

impl Theta {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if num == 0 || den == 0 || num >= den {
            return Err(Error::Argument(format!(
                "theta = {num}/{den} must lie strictly between 0 and 1"
            )));
        }
        let g = num.gcd(&den);
        let (num, den) = (num / g, den / g);
        let narrow = |v: u64| {
            u32::try_from(v).map_err(|_| Error::Argument(format!("theta denominator {v} too large")))
        };
        Ok(Self { num: narrow(num)?, den: narrow(den)? })
    }

    #[inline]
    pub fn num(&self) -> u32 {
        self.num
    }

    #[inline]
    pub fn den(&self) -> u32 {
        self.den
    }

    pub fn as_real(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `1/θ` as a real.
    pub fn reciprocal(&self) -> f64 {
        self.den as f64 / self.num as f64
    }
}

impl fmt::Display for Theta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Theta {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Argument(format!("theta must be written a/b, got {s:?}"));
        let (a, b) = s.trim().split_once('/').ok_or_else(bad)?;
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().parse().map_err(|_| bad())?;
        Theta::new(a, b)
    }
}

/// `r >= n^θ`, decided exactly.
#[inline]
pub fn threshold_test(r: u64, n: u64, theta: Theta) -> bool {
    cmp_powers(r, theta.den, n, theta.num) != Ordering::Less
}

/// Which algorithm produced a [`TupleCount`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Oracle,
    Fast,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Oracle => "oracle",
            Method::Fast => "fast",
        })
    }
}

/// Result of a `T_{k,θ}(x)` evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TupleCount {
    pub x: u64,
    pub k: u32,
    pub theta: Theta,
    /// Ordered tuples, repetition allowed.
    pub ordered_count: u64,
    /// Multisets of primes; only the fast method reports it.
    pub unordered_count: Option<u64>,
    pub method: Method,
}

/// Counts primes `p <= x` satisfying `keep(p)`, in parallel over fixed blocks.
fn count_primes_where<F>(sieve: &SieveCache, x: u64, keep: F) -> Result<u64>
where
    F: Fn(u64) -> Result<bool> + Sync,
{
    sieve.ensure_covers(x)?;
    let blocks = x / COUNT_BLOCK + 1;
    (0..blocks)
        .into_par_iter()
        .map(|b| {
            let lo = b * COUNT_BLOCK;
            let hi = (lo + COUNT_BLOCK - 1).min(x);
            let mut count = 0u64;
            for p in sieve.iter_range(lo.saturating_sub(1), hi) {
                if keep(p)? {
                    count += 1;
                }
            }
            Ok(count)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))
}

/// `T_θ(x) = #{p <= x : P⁺(p−1) >= p^θ}`.
pub fn t_theta(tables: &PrimeTables, x: u64, theta: Theta) -> Result<u64> {
    count_primes_where(tables.sieve(), x, |p| {
        Ok(threshold_test(tables.greatest_prime_factor(p - 1)?, p, theta))
    })
}

/// `T'_θ(x) = #{p <= x : P⁺(p−1) >= x^θ}`.
pub fn t_prime_theta(tables: &PrimeTables, x: u64, theta: Theta) -> Result<u64> {
    tables.sieve().ensure_covers(x)?;
    // smallest r with r^den >= x^num
    let below = largest_where(
        (x as f64).powf(theta.as_real()),
        |r| r == 0 || cmp_powers(r, theta.den, x, theta.num) == Ordering::Less,
    );
    let r_min = below + 1;
    count_primes_where(tables.sieve(), x, |p| {
        Ok(tables.greatest_prime_factor(p - 1)? >= r_min)
    })
}

/// `T^c_θ(x) = #{p <= x : P⁺(p−1) <= p^θ}`.
pub fn t_smooth_theta(tables: &PrimeTables, x: u64, theta: Theta) -> Result<u64> {
    count_primes_where(tables.sieve(), x, |p| {
        let r = tables.greatest_prime_factor(p - 1)?;
        Ok(cmp_powers(r, theta.den, p, theta.num) != Ordering::Greater)
    })
}

/// `#{p <= x : P⁺(p−1)^den = p^num}`: primes sitting exactly on the threshold.
pub fn t_boundary_theta(tables: &PrimeTables, x: u64, theta: Theta) -> Result<u64> {
    count_primes_where(tables.sieve(), x, |p| {
        let r = tables.greatest_prime_factor(p - 1)?;
        Ok(cmp_powers(r, theta.den, p, theta.num) == Ordering::Equal)
    })
}

fn check_tuple_args(tables: &PrimeTables, x: u64, k: u32) -> Result<()> {
    if k == 0 {
        return Err(Error::Argument("k must be at least 1".into()));
    }
    tables.sieve().ensure_covers(x)
}

fn gcd_of_shifts(tuple: &[u64]) -> u64 {
    tuple.iter().fold(0u64, |g, &p| g.gcd(&(p - 1)))
}

/// `T_{k,θ}(x)` by direct depth-first enumeration of ordered prime tuples
/// with product pruning.
pub fn t_k_theta_oracle(tables: &PrimeTables, x: u64, k: u32, theta: Theta) -> Result<TupleCount> {
    t_k_theta_oracle_with_budget(tables, x, k, theta, DEFAULT_NODE_BUDGET)
}

pub fn t_k_theta_oracle_with_budget(
    tables: &PrimeTables,
    x: u64,
    k: u32,
    theta: Theta,
    node_budget: u64,
) -> Result<TupleCount> {
    check_tuple_args(tables, x, k)?;
    let max_single = x >> (k - 1).min(63);
    let primes: Vec<u64> = tables.sieve().iter_range(0, max_single).collect();

    struct Search<'a> {
        tables: &'a PrimeTables,
        primes: &'a [u64],
        x: u64,
        k: usize,
        theta: Theta,
        budget: u64,
        nodes: u64,
        count: u64,
        tuple: Vec<u64>,
    }

    impl Search<'_> {
        fn visit(&mut self, product: u64) -> Result<()> {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(Error::Budget(format!(
                    "oracle visited more than {} nodes",
                    self.budget
                )));
            }
            let depth = self.tuple.len();
            if depth == self.k {
                let r = self.tables.greatest_prime_factor(gcd_of_shifts(&self.tuple))?;
                if threshold_test(r, product, self.theta) {
                    self.count += 1;
                }
                return Ok(());
            }
            // the remaining slots hold primes >= 2 each
            let reserve = 1u64 << (self.k - depth - 1);
            for &p in self.primes {
                match product.checked_mul(p).and_then(|v| v.checked_mul(reserve)) {
                    Some(v) if v <= self.x => {}
                    _ => break,
                }
                self.tuple.push(p);
                self.visit(product * p)?;
                self.tuple.pop();
            }
            Ok(())
        }
    }

    let mut search = Search {
        tables,
        primes: &primes,
        x,
        k: k as usize,
        theta,
        budget: node_budget,
        nodes: 0,
        count: 0,
        tuple: Vec::with_capacity(k as usize),
    };
    search.visit(1)?;
    Ok(TupleCount {
        x,
        k,
        theta,
        ordered_count: search.count,
        unordered_count: None,
        method: Method::Oracle,
    })
}

/// Largest `n` with `r^den >= n^num`, capped at `cap`.
fn product_cap(r: u64, theta: Theta, cap: u64) -> u64 {
    let log_bound = theta.den as f64 * (r as f64).ln() / theta.num as f64;
    if log_bound > (cap as f64).ln() + 1e-6 {
        return cap;
    }
    largest_where(log_bound.exp(), |n| {
        n == 0 || (n <= cap && cmp_powers(n, theta.num, r, theta.den) != Ordering::Greater)
    })
}

/// Ordered and unordered tuple counts for one outer prime `r`.
fn count_for_outer_prime(
    tables: &PrimeTables,
    x: u64,
    k: u32,
    theta: Theta,
    r: u64,
) -> Result<(u64, u64)> {
    let cap = product_cap(r, theta, x);
    // every coordinate is at least r + 1
    let mut others = 1u64;
    for _ in 1..k {
        others = others.saturating_mul(r + 1);
    }
    if others > cap {
        return Ok((0, 0));
    }
    let sieve = tables.sieve();
    let single_max = cap / others;
    let candidates: Vec<u64> = (1..)
        .map(|h| h * r + 1)
        .take_while(|&q| q <= single_max)
        .filter(|&q| sieve.is_prime(q))
        .collect();
    if candidates.is_empty() {
        return Ok((0, 0));
    }

    let factorials: Vec<u64> = (0..=k as u64)
        .scan(1u64, |acc, i| {
            if i > 0 {
                *acc *= i;
            }
            Some(*acc)
        })
        .collect();

    struct Walk<'a> {
        tables: &'a PrimeTables,
        candidates: &'a [u64],
        cap: u64,
        k: usize,
        r: u64,
        factorials: &'a [u64],
        indices: Vec<usize>,
        ordered: u64,
        unordered: u64,
    }

    impl Walk<'_> {
        fn visit(&mut self, start: usize, product: u64) -> Result<()> {
            let depth = self.indices.len();
            if depth == self.k {
                let tuple: Vec<u64> = self.indices.iter().map(|&i| self.candidates[i]).collect();
                if self.tables.greatest_prime_factor(gcd_of_shifts(&tuple))? == self.r {
                    self.ordered += self.multinomial();
                    self.unordered += 1;
                }
                return Ok(());
            }
            let remaining = (self.k - depth - 1) as u32;
            for i in start..self.candidates.len() {
                let q = self.candidates[i];
                // nondecreasing tuple: the rest are >= q
                let least = q
                    .checked_pow(remaining)
                    .and_then(|t| t.checked_mul(q))
                    .and_then(|t| t.checked_mul(product));
                match least {
                    Some(v) if v <= self.cap => {}
                    _ => break,
                }
                self.indices.push(i);
                self.visit(i, product * q)?;
                self.indices.pop();
            }
            Ok(())
        }

        /// Number of distinct orderings of the current nondecreasing tuple.
        fn multinomial(&self) -> u64 {
            let mut denom = 1u64;
            let mut run = 1usize;
            for w in self.indices.windows(2) {
                if w[0] == w[1] {
                    run += 1;
                } else {
                    denom *= self.factorials[run];
                    run = 1;
                }
            }
            denom *= self.factorials[run];
            self.factorials[self.k] / denom
        }
    }

    let mut walk = Walk {
        tables,
        candidates: &candidates,
        cap,
        k: k as usize,
        r,
        factorials: &factorials,
        indices: Vec::with_capacity(k as usize),
        ordered: 0,
        unordered: 0,
    };
    walk.visit(0, 1)?;
    Ok((walk.ordered, walk.unordered))
}

/// `T_{k,θ}(x)` by summing over the largest prime factor `r` of the common gcd.
pub fn t_k_theta_fast(tables: &PrimeTables, x: u64, k: u32, theta: Theta) -> Result<TupleCount> {
    check_tuple_args(tables, x, k)?;
    let outer: Vec<u64> = tables.sieve().iter_range(0, floor_root(x, k)).collect();
    let (ordered, unordered) = outer
        .par_iter()
        .map(|&r| count_for_outer_prime(tables, x, k, theta, r))
        .try_reduce(|| (0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1)))?;
    Ok(TupleCount {
        x,
        k,
        theta,
        ordered_count: ordered,
        unordered_count: Some(unordered),
        method: Method::Fast,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn th(s: &str) -> Theta {
        s.parse().unwrap()
    }

    #[test]
    fn theta_parsing() {
        assert_eq!(th("2/8"), Theta::new(1, 4).unwrap());
        assert_eq!(th(" 1 / 2 ").to_string(), "1/2");
        assert!((th("1/3").as_real() - 1.0 / 3.0).abs() < 1e-16);
        for bad in ["0.25", "1/1", "0/3", "3/2", "a/b", "1/0", "-1/2", "1/"] {
            assert!(bad.parse::<Theta>().is_err(), "{bad}");
        }
    }

    #[test]
    fn threshold_examples() {
        assert!(threshold_test(2, 9, th("1/4")));
        assert!(!threshold_test(2, 21, th("1/4")));
        assert!(threshold_test(5, 25, th("1/2")));
        assert!(threshold_test(1, 1, th("1/2")));
        assert!(!threshold_test(1, 2, th("1/2")));
    }

    #[test]
    fn single_prime_counts() {
        let t = PrimeTables::build(1000).unwrap();
        let half = th("1/2");
        assert_eq!(t_theta(&t, 10, half).unwrap(), 2);
        assert_eq!(t_theta(&t, 2, half).unwrap(), 0);
        assert_eq!(t_prime_theta(&t, 10, half).unwrap(), 0);
        assert_eq!(t_smooth_theta(&t, 10, half).unwrap(), 2);
        assert_eq!(t_smooth_theta(&t, 2, th("9/10")).unwrap(), 1);
        assert!(matches!(t_theta(&t, 1001, half), Err(Error::Range(_))));
    }

    #[test]
    fn t_prime_theta_at_100_by_brute_force() {
        let t = PrimeTables::build(100).unwrap();
        let brute = (2..=100u64)
            .filter(|&p| t.sieve().is_prime(p))
            .filter(|&p| {
                let mut m = p - 1;
                let mut big = 1;
                let mut d = 2;
                while m > 1 {
                    while m % d == 0 {
                        m /= d;
                        big = d;
                    }
                    d += 1;
                }
                big >= 10
            })
            .count() as u64;
        assert_eq!(t_prime_theta(&t, 100, th("1/2")).unwrap(), brute);
    }

    #[test]
    fn oracle_examples() {
        let t = PrimeTables::build(100).unwrap();
        let q = th("1/4");
        assert_eq!(t_k_theta_oracle(&t, 35, 2, q).unwrap().ordered_count, 3);
        assert_eq!(t_k_theta_oracle(&t, 8, 2, q).unwrap().ordered_count, 0);
        assert_eq!(t_k_theta_oracle(&t, 9, 2, q).unwrap().ordered_count, 1);
    }

    #[test]
    fn fast_examples() {
        let t = PrimeTables::build(100).unwrap();
        let c = t_k_theta_fast(&t, 35, 2, th("1/4")).unwrap();
        assert_eq!(c.ordered_count, 3);
        // {3,3} and {3,5}
        assert_eq!(c.unordered_count, Some(2));
        assert_eq!(c.method, Method::Fast);
    }

    #[test]
    fn oracle_budget_guard() {
        let t = PrimeTables::build(5000).unwrap();
        let err = t_k_theta_oracle_with_budget(&t, 5000, 2, th("1/4"), 100).unwrap_err();
        assert!(matches!(err, Error::Budget(_)));
    }

    #[test]
    fn k_one_reduces_to_t_theta() {
        let t = PrimeTables::build(3000).unwrap();
        for theta in ["1/2", "1/3", "3/5"] {
            let theta = th(theta);
            let single = t_theta(&t, 3000, theta).unwrap();
            assert_eq!(t_k_theta_oracle(&t, 3000, 1, theta).unwrap().ordered_count, single);
            assert_eq!(t_k_theta_fast(&t, 3000, 1, theta).unwrap().ordered_count, single);
        }
    }

    #[test]
    fn product_cap_matches_definition() {
        let theta = th("409/1600");
        for r in [2u64, 3, 5, 7, 11, 13] {
            let cap = product_cap(r, theta, 1_000_000);
            assert!(cap == 1_000_000 || threshold_test(r, cap, theta));
            if cap < 1_000_000 {
                assert!(!threshold_test(r, cap + 1, theta));
            }
        }
        assert_eq!(product_cap(3, th("1/4"), 1000), 81);
        assert_eq!(product_cap(2, th("1/4"), 1000), 16);
    }
}
