//! Prime generation, factorization and prime-indexed sums.
//!
//! [`SieveCache`] is a plain bitset over `0..=limit` (bit `n` set iff `n` is
//! prime), filled by a segmented sieve of Eratosthenes. [`SpfTable`] holds the
//! smallest prime factor of every integer up to a smaller limit and serves
//! fast factorization; beyond it, [`factorize`] falls back to trial division
//! by the sieve's primes.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::isqrt;
use crate::summation::CompensatedSum;

/// Default ceiling on sieve limits.
pub const DEFAULT_SIEVE_CEILING: u64 = 1 << 40;
/// Default cap for [`SpfTable::build`].
pub const DEFAULT_SPF_CAP: u64 = 10_000_000;
/// Hard cap for [`SpfTable::build_with_cap`] (4 bytes per entry).
pub const MAX_SPF_CAP: u64 = 100_000_000;

const SEGMENT_WORDS: usize = 4096;
const SEGMENT_BITS: u64 = SEGMENT_WORDS as u64 * 64;

/// Simple (unsegmented) sieve of Eratosthenes returning every prime `<= n`.
///
/// Used for the base primes of the segmented sieve and as an independent
/// reference implementation.
pub fn simple_sieve(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut i = 2;
    while i * i <= n {
        if !composite[i] {
            for j in (i * i..=n).step_by(i) {
                composite[j] = true;
            }
        }
        i += 1;
    }
    (2..=n).filter(|&k| !composite[k]).map(|k| k as u64).collect()
}

/// Primality bitset over `0..=limit`.
#[derive(Clone, PartialEq, Eq)]
pub struct SieveCache {
    limit: u64,
    bits: Vec<u64>,
}

impl std::fmt::Debug for SieveCache {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SieveCache").field("limit", &self.limit).finish_non_exhaustive()
    }
}

impl SieveCache {
    pub fn build(limit: u64) -> Result<Self> {
        Self::build_with_ceiling(limit, DEFAULT_SIEVE_CEILING)
    }

    pub fn build_with_ceiling(limit: u64, ceiling: u64) -> Result<Self> {
        if limit < 2 {
            return Err(Error::Capacity(format!("sieve limit {limit} is below 2")));
        }
        if limit > ceiling {
            return Err(Error::Capacity(format!(
                "sieve limit {limit} exceeds the memory ceiling {ceiling}"
            )));
        }
        let words = words_for(limit);
        let words_usize = usize::try_from(words)
            .map_err(|_| Error::Capacity(format!("sieve limit {limit} does not fit in memory")))?;
        let base = simple_sieve(isqrt(limit));
        let mut bits = vec![!0u64; words_usize];

        bits.par_chunks_mut(SEGMENT_WORDS)
            .enumerate()
            .for_each(|(seg, chunk)| {
                let lo = seg as u64 * SEGMENT_BITS;
                let hi = lo + chunk.len() as u64 * 64; // exclusive
                for &p in &base {
                    if p * p >= hi {
                        break;
                    }
                    let mut m = (p * p).max(lo.div_ceil(p) * p);
                    while m < hi {
                        let off = m - lo;
                        chunk[(off / 64) as usize] &= !(1u64 << (off % 64));
                        m += p;
                    }
                }
            });

        bits[0] &= !0b11;
        clear_above(&mut bits, limit);
        Ok(Self { limit, bits })
    }

    /// Reassembles a cache from raw words, checking the layout invariants.
    pub fn from_words(limit: u64, bits: Vec<u64>) -> Result<Self> {
        if limit < 2 {
            return Err(Error::Format(format!("limit {limit} is below 2")));
        }
        if bits.len() as u64 != words_for(limit) {
            return Err(Error::Format(format!(
                "expected {} words for limit {limit}, found {}",
                words_for(limit),
                bits.len()
            )));
        }
        let mut check = bits.clone();
        clear_above(&mut check, limit);
        if check != bits || bits[0] & 0b111 != 0b100 {
            return Err(Error::Format("bitset violates the sieve layout".into()));
        }
        Ok(Self { limit, bits })
    }

    #[inline]
    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Raw bitset words, little-endian bit order within each word.
    pub fn words(&self) -> &[u64] {
        &self.bits
    }

    /// Fails with a range error unless `n <= limit`.
    pub fn ensure_covers(&self, n: u64) -> Result<()> {
        if n > self.limit {
            Err(Error::Range(format!(
                "{n} lies beyond the sieve limit {}",
                self.limit
            )))
        } else {
            Ok(())
        }
    }

    /// Primality of `n`. Panics if `n > limit`.
    #[inline]
    pub fn is_prime(&self, n: u64) -> bool {
        assert!(n <= self.limit, "{n} beyond sieve limit {}", self.limit);
        self.bits[(n / 64) as usize] >> (n % 64) & 1 == 1
    }

    /// Primality of a signed value; anything below 2 is not prime.
    #[inline]
    pub fn is_prime_signed(&self, n: i128) -> bool {
        n >= 2 && self.is_prime(n as u64)
    }

    /// Ascending iterator over the primes `p` with `lo < p <= hi`.
    /// `hi` is clamped to the limit.
    pub fn iter_range(&self, lo: u64, hi: u64) -> PrimeIter<'_> {
        PrimeIter::new(&self.bits, lo.saturating_add(1), hi.min(self.limit))
    }

    /// Every prime up to the limit.
    pub fn primes(&self) -> PrimeIter<'_> {
        self.iter_range(0, self.limit)
    }

    /// Primes in the half-open interval `(lo, hi]`.
    pub fn primes_in(&self, lo: u64, hi: u64) -> Result<Vec<u64>> {
        self.ensure_covers(hi)?;
        Ok(self.iter_range(lo, hi).collect())
    }

    /// `π(x)`.
    pub fn prime_count(&self, x: u64) -> Result<u64> {
        self.ensure_covers(x)?;
        let full = (x / 64) as usize;
        let mut count: u64 = self.bits[..full].iter().map(|w| w.count_ones() as u64).sum();
        let rem = x % 64;
        let mask = if rem == 63 { !0 } else { (1u64 << (rem + 1)) - 1 };
        count += (self.bits[full] & mask).count_ones() as u64;
        Ok(count)
    }

    /// `#{p <= x : p ≡ a (mod m)}`.
    pub fn prime_count_ap(&self, x: u64, m: u64, a: u64) -> Result<u64> {
        check_progression(m, a)?;
        self.ensure_covers(x)?;
        Ok(progression(a, m, x).filter(|&q| self.is_prime(q)).count() as u64)
    }

    /// `Σ 1/q` over primes `q <= x` with `q ≡ a (mod m)`, compensated, ascending.
    pub fn recip_prime_sum_ap(&self, x: u64, m: u64, a: u64) -> Result<f64> {
        check_progression(m, a)?;
        self.ensure_covers(x)?;
        let acc: CompensatedSum = progression(a, m, x)
            .filter(|&q| self.is_prime(q))
            .map(|q| 1.0 / q as f64)
            .collect();
        Ok(acc.value())
    }
}

fn words_for(limit: u64) -> u64 {
    limit / 64 + 1
}

fn clear_above(bits: &mut [u64], limit: u64) {
    let last = (limit / 64) as usize;
    let keep = limit % 64;
    if keep < 63 {
        bits[last] &= (1u64 << (keep + 1)) - 1;
    }
    for w in &mut bits[last + 1..] {
        *w = 0;
    }
}

fn check_progression(m: u64, a: u64) -> Result<()> {
    if m == 0 {
        return Err(Error::Argument("modulus must be at least 1".into()));
    }
    if a >= m {
        return Err(Error::Argument(format!("residue {a} not in [0, {m})")));
    }
    Ok(())
}

/// `a, a+m, a+2m, … <= x`.
fn progression(a: u64, m: u64, x: u64) -> impl Iterator<Item = u64> {
    (0..)
        .map(move |i: u64| a + i * m)
        .take_while(move |&q| q <= x)
}

/// Ascending iterator over the set bits of a sieve within an inclusive range.
#[derive(Clone)]
pub struct PrimeIter<'a> {
    bits: &'a [u64],
    word_index: usize,
    current: u64,
    end: u64,
}

impl<'a> PrimeIter<'a> {
    fn new(bits: &'a [u64], start: u64, end: u64) -> Self {
        if start > end {
            return Self { bits, word_index: bits.len(), current: 0, end };
        }
        let word_index = (start / 64) as usize;
        let current = bits[word_index] & (!0u64 << (start % 64));
        Self { bits, word_index, current, end }
    }
}

impl Iterator for PrimeIter<'_> {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        loop {
            if self.current != 0 {
                let n = self.word_index as u64 * 64 + self.current.trailing_zeros() as u64;
                if n > self.end {
                    self.word_index = self.bits.len();
                    self.current = 0;
                    return None;
                }
                self.current &= self.current - 1;
                return Some(n);
            }
            self.word_index += 1;
            if self.word_index >= self.bits.len() || self.word_index as u64 * 64 > self.end {
                self.word_index = self.bits.len();
                return None;
            }
            self.current = self.bits[self.word_index];
        }
    }
}

/// Smallest-prime-factor table; `spf[0] = spf[1] = 0`.
#[derive(Clone)]
pub struct SpfTable {
    spf: Vec<u32>,
}

impl std::fmt::Debug for SpfTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpfTable").field("limit", &self.limit()).finish_non_exhaustive()
    }
}

impl SpfTable {
    pub fn build(limit: u64) -> Result<Self> {
        Self::build_with_cap(limit, DEFAULT_SPF_CAP)
    }

    pub fn build_with_cap(limit: u64, cap: u64) -> Result<Self> {
        if limit < 2 {
            return Err(Error::Capacity(format!("spf limit {limit} is below 2")));
        }
        let cap = cap.min(MAX_SPF_CAP);
        if limit > cap {
            return Err(Error::Capacity(format!("spf limit {limit} exceeds cap {cap}")));
        }
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        for i in 2..=n {
            if spf[i] != 0 {
                continue;
            }
            spf[i] = i as u32;
            if let Some(start) = i.checked_mul(i) {
                for j in (start..=n).step_by(i) {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                }
            }
        }
        Ok(Self { spf })
    }

    #[inline]
    pub fn limit(&self) -> u64 {
        (self.spf.len() - 1) as u64
    }

    /// Smallest prime factor of `n` (0 for `n < 2`). Panics past the limit.
    #[inline]
    pub fn get(&self, n: u64) -> u64 {
        self.spf[n as usize] as u64
    }
}

/// Prime factorization as ascending `(prime, exponent)` pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pairs: Vec<(u64, u32)>,
    value: u64,
}

impl Factorization {
    pub fn pairs(&self) -> &[(u64, u32)] {
        &self.pairs
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.pairs.iter().map(|&(p, _)| p)
    }

    /// `ω(n)`.
    pub fn omega(&self) -> u32 {
        self.pairs.len() as u32
    }

    /// `μ(n)`.
    pub fn mobius(&self) -> i8 {
        if self.pairs.iter().any(|&(_, e)| e > 1) {
            0
        } else if self.pairs.len() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// `P⁺(n)` with `P⁺(1) = 1`.
    pub fn greatest_prime(&self) -> u64 {
        self.pairs.last().map_or(1, |&(p, _)| p)
    }

    /// All positive divisors, unsorted.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, e) in &self.pairs {
            let len = divs.len();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs
    }
}

/// Complete factorization of `n >= 1`: via the table when `n` is in range,
/// otherwise by trial division with the sieve's primes (requires `√n <= cache.limit`).
pub fn factorize(n: u64, spf: Option<&SpfTable>, cache: &SieveCache) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::Argument("cannot factorize 0".into()));
    }
    let mut pairs = Vec::new();
    match spf {
        Some(table) if n <= table.limit() => {
            let mut m = n;
            while m > 1 {
                let p = table.get(m);
                let mut e = 0;
                while m % p == 0 {
                    m /= p;
                    e += 1;
                }
                pairs.push((p, e));
            }
        }
        _ => {
            if isqrt(n) > cache.limit() {
                return Err(Error::Coverage(format!(
                    "factorizing {n} needs primes up to {}, sieve stops at {}",
                    isqrt(n),
                    cache.limit()
                )));
            }
            let mut m = n;
            for p in cache.primes() {
                if p * p > m {
                    break;
                }
                if m % p == 0 {
                    let mut e = 0;
                    while m % p == 0 {
                        m /= p;
                        e += 1;
                    }
                    pairs.push((p, e));
                }
            }
            if m > 1 {
                pairs.push((m, 1));
            }
        }
    }
    Ok(Factorization { pairs, value: n })
}

/// Sieve plus an optional smallest-prime-factor table: everything the
/// counting functions need to evaluate `P⁺`.
#[derive(Debug, Clone)]
pub struct PrimeTables {
    sieve: SieveCache,
    spf: Option<SpfTable>,
}

impl PrimeTables {
    /// Builds a sieve to `limit` and an SPF table to `min(limit, DEFAULT_SPF_CAP)`.
    pub fn build(limit: u64) -> Result<Self> {
        let sieve = SieveCache::build(limit)?;
        Self::with_sieve(sieve)
    }

    /// Wraps an existing sieve, adding an SPF table up to the default cap.
    pub fn with_sieve(sieve: SieveCache) -> Result<Self> {
        let spf = SpfTable::build(sieve.limit().min(DEFAULT_SPF_CAP))?;
        Ok(Self { sieve, spf: Some(spf) })
    }

    pub fn from_parts(sieve: SieveCache, spf: Option<SpfTable>) -> Self {
        Self { sieve, spf }
    }

    pub fn sieve(&self) -> &SieveCache {
        &self.sieve
    }

    pub fn spf(&self) -> Option<&SpfTable> {
        self.spf.as_ref()
    }

    pub fn factorize(&self, n: u64) -> Result<Factorization> {
        factorize(n, self.spf.as_ref(), &self.sieve)
    }

    /// `P⁺(n)`, with `P⁺(1) = 1`.
    pub fn greatest_prime_factor(&self, n: u64) -> Result<u64> {
        greatest_prime_factor(n, self.spf.as_ref(), &self.sieve)
    }

    pub fn mobius(&self, n: u64) -> Result<i8> {
        Ok(self.factorize(n)?.mobius())
    }

    pub fn omega(&self, n: u64) -> Result<u32> {
        Ok(self.factorize(n)?.omega())
    }
}

/// `P⁺(n)`, with `P⁺(1) = 1`.
pub fn greatest_prime_factor(n: u64, spf: Option<&SpfTable>, cache: &SieveCache) -> Result<u64> {
    match spf {
        Some(table) if n != 0 && n <= table.limit() => {
            let mut m = n;
            let mut largest = 1;
            while m > 1 {
                let p = table.get(m);
                while m % p == 0 {
                    m /= p;
                }
                largest = p;
            }
            Ok(largest)
        }
        _ => Ok(factorize(n, spf, cache)?.greatest_prime()),
    }
}

pub fn mobius(n: u64, spf: Option<&SpfTable>, cache: &SieveCache) -> Result<i8> {
    Ok(factorize(n, spf, cache)?.mobius())
}

pub fn omega(n: u64, spf: Option<&SpfTable>, cache: &SieveCache) -> Result<u32> {
    Ok(factorize(n, spf, cache)?.omega())
}
