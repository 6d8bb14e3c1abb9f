//! Simultaneous prime values of linear forms `aᵢ·n + bᵢ`.
//!
//! Covers the counting function `M(t)`, the local densities `ρ(p)`, the sieve
//! majorant `∏_{p|E}(1−1/p)^{ρ(p)−g}·y/(log y)^{g+1}` with its implied constant
//! left out, and both sides of the partial-summation identity for
//! `Σ p^{−k}` over a prime window.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{cmp_products, floor_root, largest_where};
use crate::primes::SieveCache;
use crate::shifted::Theta;
use crate::summation::CompensatedSum;

const COUNT_BLOCK: u64 = 1 << 16;

/// The form `a·n + b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LinearForm {
    pub a: i64,
    pub b: i64,
}

impl LinearForm {
    #[inline]
    pub fn eval(&self, n: u64) -> i128 {
        self.a as i128 * n as i128 + self.b as i128
    }
}

/// A system of linear forms with nonvanishing
/// `E = ∏ aᵢ · ∏_{r<s} (a_r b_s − a_s b_r)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftSystem {
    forms: Vec<LinearForm>,
    e: BigInt,
    /// Distinct primes dividing `|E|`, ascending.
    e_primes: Vec<u64>,
}

impl ShiftSystem {
    /// Builds a system from `(aᵢ, bᵢ)` pairs. Requires `g >= 1`, `aᵢ >= 1` and `E != 0`.
    pub fn new(forms: &[(i64, i64)]) -> Result<Self> {
        if forms.is_empty() {
            return Err(Error::Argument("a system needs at least one form".into()));
        }
        if let Some(&(a, _)) = forms.iter().find(|&&(a, _)| a < 1) {
            return Err(Error::Argument(format!("leading coefficient {a} must be positive")));
        }
        let forms: Vec<LinearForm> = forms.iter().map(|&(a, b)| LinearForm { a, b }).collect();
        let mut factors: Vec<i128> = forms.iter().map(|f| f.a as i128).collect();
        for (r, fr) in forms.iter().enumerate() {
            for fs in &forms[r + 1..] {
                factors.push(fr.a as i128 * fs.b as i128 - fs.a as i128 * fr.b as i128);
            }
        }
        if factors.contains(&0) {
            return Err(Error::Degenerate("E = 0 (two forms are proportional)".into()));
        }
        let e = factors.iter().fold(BigInt::one(), |acc, &f| acc * BigInt::from(f));
        let mut e_primes: Vec<u64> = factors
            .iter()
            .flat_map(|&f| distinct_prime_factors(f.unsigned_abs()))
            .collect();
        e_primes.sort_unstable();
        e_primes.dedup();
        Ok(Self { forms, e, e_primes })
    }

    /// The system `{hᵢ·n + 1}`.
    pub fn from_shifts(shifts: &[i64]) -> Result<Self> {
        let forms: Vec<(i64, i64)> = shifts.iter().map(|&h| (h, 1)).collect();
        Self::new(&forms)
    }

    pub fn forms(&self) -> &[LinearForm] {
        &self.forms
    }

    /// Arity `g`.
    pub fn arity(&self) -> usize {
        self.forms.len()
    }

    /// Signed `E` as in the sieve lemma.
    pub fn e(&self) -> &BigInt {
        &self.e
    }

    /// Distinct primes of `|E|`.
    pub fn e_primes(&self) -> &[u64] {
        &self.e_primes
    }

    /// The shifts `h₁ < … < h_g` when every form is `hᵢ·n + 1`.
    pub fn shifts(&self) -> Option<Vec<i64>> {
        if self.forms.iter().all(|f| f.b == 1) {
            let mut h: Vec<i64> = self.forms.iter().map(|f| f.a).collect();
            h.sort_unstable();
            Some(h)
        } else {
            None
        }
    }

    /// `E_{h₁,…,h_g} = h₁⋯h_g·∏_{i<j}(h_j − h_i)` for a shift system.
    ///
    /// Differs from [`ShiftSystem::e`] only by the sign `(−1)^{g(g−1)/2}`.
    pub fn shift_discriminant(&self) -> Option<BigInt> {
        let h = self.shifts()?;
        let mut e: BigInt = h.iter().map(|&v| BigInt::from(v)).product();
        for i in 0..h.len() {
            for j in i + 1..h.len() {
                e *= BigInt::from(h[j] - h[i]);
            }
        }
        Some(e)
    }

    /// Largest value `max aᵢ·t + bᵢ` the system reaches on `n <= t`.
    pub fn max_value(&self, t: u64) -> i128 {
        self.forms
            .iter()
            .map(|f| f.eval(t).max(f.b as i128))
            .max()
            .unwrap_or(0)
    }

    fn ensure_covered(&self, sieve: &SieveCache, t: u64) -> Result<()> {
        let top = self.max_value(t);
        if top > sieve.limit() as i128 {
            return Err(Error::Range(format!(
                "forms reach {top} at t = {t}, sieve stops at {}",
                sieve.limit()
            )));
        }
        Ok(())
    }

    #[inline]
    fn all_prime_at(&self, sieve: &SieveCache, p: u64) -> bool {
        self.forms.iter().all(|f| sieve.is_prime_signed(f.eval(p)))
    }

    /// `ρ(p)`: residues `n mod p` with `∏(aᵢn + bᵢ) ≡ 0 (mod p)`.
    pub fn local_rho(&self, p: u64) -> u64 {
        let p_i = p as i128;
        let mut roots: Vec<u64> = Vec::with_capacity(self.forms.len());
        for f in &self.forms {
            let a = (f.a as i128).rem_euclid(p_i);
            let b = (f.b as i128).rem_euclid(p_i);
            if a == 0 {
                if b == 0 {
                    return p;
                }
                continue;
            }
            let inv = mod_inverse(a, p_i);
            roots.push(((-b).rem_euclid(p_i) * inv % p_i) as u64);
        }
        roots.sort_unstable();
        roots.dedup();
        roots.len() as u64
    }

    /// `∏_{p | E} (1 − 1/p)^{ρ(p) − g}`.
    pub fn singular_factor(&self) -> f64 {
        let g = self.arity() as i32;
        self.e_primes
            .iter()
            .map(|&p| (1.0 - 1.0 / p as f64).powi(self.local_rho(p) as i32 - g))
            .product()
    }

    /// `∏_{p | E} (1 + 1/p)^ℓ`.
    pub fn local_factor_pos(&self, ell: u32) -> f64 {
        local_factor_from_primes(&self.e_primes, ell)
    }
}

impl fmt::Display for ShiftSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(h) = self.shifts() {
            let parts: Vec<String> = h.iter().map(|v| v.to_string()).collect();
            return write!(f, "shifts[{}]", parts.join(" "));
        }
        let parts: Vec<String> = self.forms.iter().map(|l| format!("{}n{:+}", l.a, l.b)).collect();
        write!(f, "forms[{}]", parts.join(" "))
    }
}

fn mod_inverse(a: i128, m: i128) -> i128 {
    let (mut old_r, mut r) = (a, m);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    old_s.rem_euclid(m)
}

/// Distinct prime factors by trial division.
fn distinct_prime_factors(mut n: u128) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d: u128 = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d as u64);
            while n % d == 0 {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n as u64);
    }
    out
}

fn local_factor_from_primes(primes: &[u64], ell: u32) -> f64 {
    primes
        .iter()
        .map(|&p| (1.0 + 1.0 / p as f64).powi(ell as i32))
        .product()
}

/// `∏_{p | |E|} (1 + 1/p)^ℓ`.
pub fn local_factor_pos(e: i64, ell: u32) -> Result<f64> {
    if e == 0 {
        return Err(Error::Degenerate("E = 0".into()));
    }
    if ell == 0 {
        return Err(Error::Argument("ell must be at least 1".into()));
    }
    Ok(local_factor_from_primes(&distinct_prime_factors(e.unsigned_abs() as u128), ell))
}

/// `M(t) = #{p <= t : aᵢp + bᵢ prime for every i}`.
pub fn count_simultaneous(sieve: &SieveCache, t: u64, system: &ShiftSystem) -> Result<u64> {
    system.ensure_covered(sieve, t)?;
    let blocks = t / COUNT_BLOCK + 1;
    Ok((0..blocks)
        .into_par_iter()
        .map(|b| {
            let lo = b * COUNT_BLOCK;
            let hi = (lo + COUNT_BLOCK - 1).min(t);
            sieve
                .iter_range(lo.saturating_sub(1), hi)
                .filter(|&p| system.all_prime_at(sieve, p))
                .count() as u64
        })
        .sum())
}

/// `M(t)` as a right-continuous step function on `[0, t_max]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepCountFunction {
    t_max: u64,
    breakpoints: Vec<u64>,
}

impl StepCountFunction {
    /// Ascending primes at which `M` jumps by one.
    pub fn breakpoints(&self) -> &[u64] {
        &self.breakpoints
    }

    pub fn t_max(&self) -> u64 {
        self.t_max
    }

    /// `M` on each constancy interval `[breakpoints[i], breakpoints[i+1])`.
    pub fn values(&self) -> impl Iterator<Item = u64> + '_ {
        1..=self.breakpoints.len() as u64
    }

    /// `M(t)` for real `t` (clamped to `t_max` from above).
    pub fn value_at(&self, t: f64) -> u64 {
        self.breakpoints.partition_point(|&p| (p as f64) <= t) as u64
    }

    /// `M(n)` for integer `n`.
    pub fn value_at_int(&self, n: u64) -> u64 {
        self.breakpoints.partition_point(|&p| p <= n) as u64
    }
}

pub fn as_step_function(sieve: &SieveCache, t_max: u64, system: &ShiftSystem) -> Result<StepCountFunction> {
    system.ensure_covered(sieve, t_max)?;
    let breakpoints = sieve
        .iter_range(0, t_max)
        .filter(|&p| system.all_prime_at(sieve, p))
        .collect();
    Ok(StepCountFunction { t_max, breakpoints })
}

/// Sieve majorant without its implied constant:
/// `∏_{p | E}(1−1/p)^{ρ(p)−g} · y/(ln y)^{g+1}`.
pub fn sieve_bound_value(y: u64, system: &ShiftSystem) -> Result<f64> {
    if y < 3 {
        return Err(Error::Domain(format!("sieve bound needs y >= 3, got {y}")));
    }
    let yf = y as f64;
    Ok(system.singular_factor() * yf / yf.ln().powi(system.arity() as i32 + 1))
}

/// Integer endpoints of the window `(x/2)^θ < p <= x^{1/k}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeWindow {
    /// `⌊(x/2)^θ⌋`; primes must exceed it.
    pub lower: u64,
    /// `⌊x^{1/k}⌋`.
    pub upper: u64,
    /// Whether `(x/2)^θ < x^{1/k}` as reals.
    pub nonempty: bool,
}

impl PrimeWindow {
    pub fn new(x: u64, k: u32, theta: Theta) -> Result<Self> {
        if x < 2 {
            return Err(Error::Argument(format!("x = {x} must be at least 2")));
        }
        if k == 0 {
            return Err(Error::Argument("k must be at least 1".into()));
        }
        let (num, den) = (theta.num(), theta.den());
        // m <= (x/2)^θ  ⟺  m^den · 2^num <= x^num
        let lower = largest_where((x as f64 / 2.0).powf(theta.as_real()), |m| {
            m == 0 || cmp_products(&[(m, den), (2, num)], &[(x, num)]) != Ordering::Greater
        });
        let upper = floor_root(x, k);
        // (x/2)^θ < x^{1/k}  ⟺  x^{num·k} < 2^{num·k} · x^{den}
        let nonempty =
            cmp_products(&[(x, num * k)], &[(2, num * k), (x, den)]) == Ordering::Less;
        Ok(Self { lower, upper, nonempty })
    }

    /// `(x/2)^θ` as a real.
    pub fn lower_real(x: u64, theta: Theta) -> f64 {
        (x as f64 / 2.0).powf(theta.as_real())
    }
}

/// `Σ p^{−k}` over `(x/2)^θ < p <= x^{1/k}` with every form prime at `p`.
pub fn inverse_power_prime_sum(
    sieve: &SieveCache,
    x: u64,
    k: u32,
    theta: Theta,
    system: &ShiftSystem,
) -> Result<f64> {
    let window = PrimeWindow::new(x, k, theta)?;
    system.ensure_covered(sieve, window.upper)?;
    if !window.nonempty {
        return Ok(0.0);
    }
    let acc: CompensatedSum = sieve
        .iter_range(window.lower, window.upper)
        .filter(|&p| system.all_prime_at(sieve, p))
        .map(|p| (p as f64).powi(-(k as i32)))
        .collect();
    Ok(acc.value())
}

/// Both sides of the partial-summation identity, with the pieces of the right side.
#[derive(Debug, Clone, PartialEq)]
pub struct AbelEvaluation {
    pub lhs: f64,
    pub rhs: f64,
    /// `M(x^{1/k}) / x`.
    pub upper_term: f64,
    /// `M((x/2)^θ) / (x/2)^{kθ}`.
    pub lower_term: f64,
    /// `k ∫ M(t) t^{−k−1} dt` over the window.
    pub integral: f64,
}

impl AbelEvaluation {
    /// `|lhs − rhs| / max(lhs, 1e-30)`.
    pub fn relative_gap(&self) -> f64 {
        (self.lhs - self.rhs).abs() / self.lhs.max(1e-30)
    }
}

/// Exact value `c₀ + c₁·A` where `c₀` is rational, `c₁` an integer and `A` the
/// irrational endpoint power `(x/2)^{−kθ}`.
#[derive(Debug, Default)]
struct EndpointLinear {
    rational: BigRational,
    endpoint: BigInt,
}

impl EndpointLinear {
    fn new() -> Self {
        Self { rational: BigRational::zero(), endpoint: BigInt::zero() }
    }

    fn eval(&self, endpoint_value: f64) -> f64 {
        let c = self.endpoint.to_f64().unwrap_or(f64::NAN);
        let r = rational_to_f64(&self.rational);
        if c == 0.0 {
            r
        } else {
            r + c * endpoint_value
        }
    }
}

fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn inverse_power(p: u64, k: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(BigUint::from(p).pow(k)))
}

/// Right side of the identity,
/// `M(x^{1/k})/x − M((x/2)^θ)/(x/2)^{kθ} + k ∫_{(x/2)^θ}^{x^{1/k}} M(t) t^{−k−1} dt`,
/// evaluated exactly: on each constancy interval `[t₁, t₂)` of `M` the integral
/// is `M·(t₁^{−k} − t₂^{−k})/k`; rational pieces are kept as exact fractions and
/// the one irrational endpoint power `(x/2)^{−kθ}` is carried symbolically with
/// an integer coefficient.
pub fn abel_identity_rhs(
    sieve: &SieveCache,
    x: u64,
    k: u32,
    theta: Theta,
    system: &ShiftSystem,
) -> Result<AbelEvaluation> {
    let window = PrimeWindow::new(x, k, theta)?;
    system.ensure_covered(sieve, window.upper)?;
    let lhs = inverse_power_prime_sum(sieve, x, k, theta, system)?;
    if !window.nonempty {
        return Ok(AbelEvaluation { lhs, rhs: 0.0, upper_term: 0.0, lower_term: 0.0, integral: 0.0 });
    }
    let step = as_step_function(sieve, window.upper, system)?;
    let m_lower = BigInt::from(step.value_at_int(window.lower));
    let m_upper = BigInt::from(step.value_at_int(window.upper));
    let inv_x = BigRational::new(BigInt::one(), BigInt::from(x));
    // (x/2)^{-kθ}
    let endpoint_value = (x as f64 / 2.0).powf(-(k as f64) * theta.as_real());

    let upper_term = BigRational::from_integer(m_upper.clone()) * &inv_x;
    let lower_term = EndpointLinear { rational: BigRational::zero(), endpoint: m_lower.clone() };

    // integral: walk constancy intervals from (x/2)^θ to x^{1/k}
    let mut integral = EndpointLinear::new();
    let mut level = m_lower.clone();
    // left end is the irrational endpoint
    integral.endpoint += &level;
    for &p in step.breakpoints().iter().filter(|&&p| p > window.lower && p <= window.upper) {
        // close [prev, p) at level, open [p, next) at level + 1
        integral.rational -= BigRational::from_integer(level.clone()) * inverse_power(p, k);
        level += 1;
        integral.rational += BigRational::from_integer(level.clone()) * inverse_power(p, k);
    }
    // right end t = x^{1/k}, where t^{-k} = 1/x exactly
    integral.rational -= BigRational::from_integer(level.clone()) * &inv_x;
    debug_assert_eq!(level, m_upper);

    let total = EndpointLinear {
        rational: &upper_term + &integral.rational,
        endpoint: &integral.endpoint - &lower_term.endpoint,
    };
    Ok(AbelEvaluation {
        lhs,
        rhs: total.eval(endpoint_value),
        upper_term: rational_to_f64(&upper_term),
        lower_term: lower_term.eval(endpoint_value),
        integral: integral.eval(endpoint_value),
    })
}

#[cfg(test)]
mod tests {
    use num_traits::Signed;

    use super::*;

    fn rho_by_scan(system: &ShiftSystem, p: u64) -> u64 {
        (0..p)
            .filter(|&n| {
                system
                    .forms()
                    .iter()
                    .map(|f| (f.eval(n)).rem_euclid(p as i128))
                    .fold(1i128, |acc, v| acc * v % p as i128)
                    == 0
            })
            .count() as u64
    }

    #[test]
    fn discriminants() {
        let s = ShiftSystem::new(&[(2, 1), (4, 1)]).unwrap();
        assert_eq!(*s.e(), BigInt::from(-16));
        let s = ShiftSystem::from_shifts(&[2, 3]).unwrap();
        assert_eq!(s.shift_discriminant(), Some(BigInt::from(6)));
        assert_eq!(s.e().abs(), BigInt::from(6));
        assert_eq!(s.e_primes(), &[2, 3]);
        assert!(matches!(ShiftSystem::from_shifts(&[2, 2]), Err(Error::Degenerate(_))));
        assert!(matches!(ShiftSystem::new(&[]), Err(Error::Argument(_))));
        assert!(matches!(ShiftSystem::new(&[(0, 1)]), Err(Error::Argument(_))));
    }

    #[test]
    fn shift_discriminant_sign_relation() {
        for shifts in [vec![2i64, 4], vec![2, 4, 6], vec![1, 3, 8, 10]] {
            let s = ShiftSystem::from_shifts(&shifts).unwrap();
            let g = shifts.len() as u32;
            let sign = if (g * (g - 1) / 2) % 2 == 0 { 1 } else { -1 };
            assert_eq!(s.shift_discriminant().unwrap(), s.e() * BigInt::from(sign));
        }
    }

    #[test]
    fn local_densities() {
        let s = ShiftSystem::new(&[(2, 1), (4, 1)]).unwrap();
        assert_eq!(s.local_rho(3), 2);
        assert_eq!(ShiftSystem::new(&[(2, 1)]).unwrap().local_rho(2), 0);
        let id = ShiftSystem::new(&[(1, 0)]).unwrap();
        for p in [2, 3, 5, 97] {
            assert_eq!(id.local_rho(p), 1);
        }
    }

    #[test]
    fn local_rho_agrees_with_residue_scan() {
        let systems = [
            ShiftSystem::from_shifts(&[2, 4, 6]).unwrap(),
            ShiftSystem::new(&[(3, -1), (5, 2), (6, 7)]).unwrap(),
            ShiftSystem::new(&[(1, 0), (1, 2), (1, 6)]).unwrap(),
        ];
        for s in &systems {
            for p in crate::primes::simple_sieve(60) {
                let rho = s.local_rho(p);
                assert_eq!(rho, rho_by_scan(s, p), "{s} at {p}");
                assert!(rho <= (s.arity() as u64).min(p));
            }
        }
    }

    #[test]
    fn simultaneous_counts() {
        let sieve = SieveCache::build(1000).unwrap();
        let sg = ShiftSystem::from_shifts(&[2]).unwrap();
        assert_eq!(count_simultaneous(&sieve, 20, &sg).unwrap(), 4);
        assert_eq!(count_simultaneous(&sieve, 2, &sg).unwrap(), 1);
        let pair = ShiftSystem::from_shifts(&[2, 4]).unwrap();
        assert_eq!(count_simultaneous(&sieve, 10, &pair).unwrap(), 1);
        assert!(matches!(count_simultaneous(&sieve, 500, &sg), Err(Error::Range(_))));
        let step = as_step_function(&sieve, 20, &sg).unwrap();
        assert_eq!(step.breakpoints(), &[2, 3, 5, 11]);
        assert_eq!(step.value_at(10.9), 3);
        assert_eq!(step.value_at(1.5), 0);
        assert_eq!(step.values().collect::<Vec<_>>(), vec![1, 2, 3, 4]);
    }

    #[test]
    fn sieve_bound_examples() {
        let sg = ShiftSystem::from_shifts(&[2]).unwrap();
        let v = sieve_bound_value(100, &sg).unwrap();
        assert!((v - 200.0 / 100f64.ln().powi(2)).abs() < 1e-12);
        assert!((v - 9.430).abs() < 1e-3);
        let ratio = sieve_bound_value(1000, &sg).unwrap() / v;
        let expected = 10.0 * (100f64.ln() / 1000f64.ln()).powi(2);
        assert!((ratio - expected).abs() < 1e-12);
        assert!(matches!(sieve_bound_value(2, &sg), Err(Error::Domain(_))));
    }

    #[test]
    fn positive_local_factor() {
        assert!((local_factor_pos(6, 2).unwrap() - 4.0).abs() < 1e-15);
        assert_eq!(local_factor_pos(1, 3).unwrap(), 1.0);
        assert_eq!(local_factor_pos(2, 1).unwrap(), 1.5);
        assert_eq!(local_factor_pos(-6, 2).unwrap(), local_factor_pos(6, 2).unwrap());
        assert!(matches!(local_factor_pos(0, 1), Err(Error::Degenerate(_))));
    }

    #[test]
    fn singular_factor_below_positive_factor() {
        for shifts in [vec![2i64], vec![2, 4], vec![2, 6, 8], vec![6, 10, 12]] {
            let s = ShiftSystem::from_shifts(&shifts).unwrap();
            let g = s.arity() as i32;
            for &p in s.e_primes() {
                let pf = p as f64;
                let left = (1.0 - 1.0 / pf).powi(s.local_rho(p) as i32 - g);
                // (1−1/p)^{−g} = (1+1/p)^g (1−1/p²)^{−g} is the worst case, at ρ(p) = 0
                let right = (1.0 + 1.0 / pf).powi(g) * (1.0 - 1.0 / (pf * pf)).powi(-g);
                assert!(left <= right * (1.0 + 1e-15), "{s} at {p}: {left} > {right}");
            }
            let zeta2 = std::f64::consts::PI.powi(2) / 6.0;
            assert!(s.singular_factor() <= zeta2.powi(g) * s.local_factor_pos(g as u32));
        }
    }

    #[test]
    fn uncorrected_local_comparison_fails_without_roots() {
        // 2n+1 has no root mod 2, so the factor at 2 is (1/2)^{−1} = 2 > 3/2
        let s = ShiftSystem::from_shifts(&[2]).unwrap();
        assert_eq!(s.local_rho(2), 0);
        assert_eq!(s.singular_factor(), 2.0);
        assert_eq!(s.local_factor_pos(1), 1.5);
    }

    #[test]
    fn window_bounds_are_exact() {
        let quarter: Theta = "1/4".parse().unwrap();
        let w = PrimeWindow::new(10_000, 2, quarter).unwrap();
        assert_eq!((w.lower, w.upper, w.nonempty), (8, 100, true));
        // (x/2)^θ integral: x = 2·3^4 = 162 gives exactly 3
        let w = PrimeWindow::new(162, 2, quarter).unwrap();
        assert_eq!(w.lower, 3);
        // θ = 1/2, k = 2: (x/2)^{1/2} < x^{1/2} always
        let w = PrimeWindow::new(50, 2, "1/2".parse().unwrap()).unwrap();
        assert_eq!((w.lower, w.upper, w.nonempty), (5, 7, true));
        // θ = 3/4, k = 2 empty once (x/2)^{3/4} >= x^{1/2}, i.e. x >= 8
        let w = PrimeWindow::new(8, 2, "3/4".parse().unwrap()).unwrap();
        assert!(!w.nonempty);
        let w = PrimeWindow::new(7, 2, "3/4".parse().unwrap()).unwrap();
        assert!(w.nonempty);
    }

    #[test]
    fn inverse_power_sum_example() {
        let sieve = SieveCache::build(1000).unwrap();
        let sg = ShiftSystem::from_shifts(&[2]).unwrap();
        let quarter: Theta = "1/4".parse().unwrap();
        let v = inverse_power_prime_sum(&sieve, 10_000, 2, quarter, &sg).unwrap();
        let direct: f64 = [11.0f64, 23.0, 29.0, 41.0, 53.0, 83.0, 89.0]
            .iter()
            .map(|p| 1.0 / (p * p))
            .sum();
        assert!((v - direct).abs() < 1e-15);
        assert!((v - 0.012_566).abs() < 1e-6);
    }

    #[test]
    fn abel_identity_small_cases() {
        let sieve = SieveCache::build(100_000).unwrap();
        let quarter: Theta = "1/4".parse().unwrap();
        let sg = ShiftSystem::from_shifts(&[2]).unwrap();
        let ev = abel_identity_rhs(&sieve, 10_000, 2, quarter, &sg).unwrap();
        assert!(ev.relative_gap() <= 1e-12, "{ev:?}");
        assert!(ev.lhs > 0.0);
        // empty window
        let ev = abel_identity_rhs(&sieve, 100, 2, "3/4".parse().unwrap(), &sg).unwrap();
        assert_eq!((ev.lhs, ev.rhs), (0.0, 0.0));
        // no qualifying primes inside the window: both sides vanish exactly
        let pair = ShiftSystem::from_shifts(&[2, 4]).unwrap();
        let ev = abel_identity_rhs(&sieve, 100_000, 3, "1/6".parse().unwrap(), &pair).unwrap();
        assert_eq!(ev.lhs, 0.0);
        assert_eq!(ev.rhs, 0.0);
    }

    #[test]
    fn rational_conversion() {
        let r = BigRational::new(BigInt::from(1), BigInt::from(3));
        assert!((rational_to_f64(&r) - 1.0 / 3.0).abs() < 1e-16);
        let r = BigRational::new(BigInt::from(-7), BigInt::from(2).pow(200u32));
        assert!((rational_to_f64(&r) / (-7.0 * 2f64.powi(-200)) - 1.0).abs() < 1e-15);
        let big = BigRational::new(BigInt::from(10).pow(40u32) + 1, BigInt::from(3));
        assert!((rational_to_f64(&big) / (1e40 / 3.0) - 1.0).abs() < 1e-15);
    }
}
