//! The weighted tuple sum
//! `W_{g,ℓ}(z) = Σ_{1<h₁<…<h_g<z} (h₁⋯h_g)⁻¹ ∏_{p | E}(1 + 1/p)^ℓ`,
//! `E = h₁⋯h_g·∏_{i<j}(h_j − h_i)`, together with the moment sums that bound it
//! through Hölder's inequality and the Möbius expansion behind the moment
//! estimates.
//!
//! Every integer below `z` gets its list of distinct primes once. A tuple's
//! factor `∏_{p|E}(1+1/p)` is then maintained incrementally: a per-prime
//! occurrence counter tells whether a prime of `hᵢ` or of `h_j − hᵢ` is new to
//! the union.
//!
//! Tuples are grouped by their largest element. Each group is summed with
//! compensation in lexicographic order, and groups are combined in increasing
//! order, which also yields `W` at every smaller `z` for free.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::summation::{compensated_sum, CompensatedSum};

/// Largest admissible number of tuples `C(z−2, g)`.
pub const TUPLE_BUDGET: f64 = 1e9;

fn binomial_f64(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `G = g + C(g, 2)`.
pub fn holder_exponent(g: u32) -> u32 {
    g + g * g.saturating_sub(1) / 2
}

fn check_args(g: u32, ell: u32, z: u64) -> Result<()> {
    if g == 0 || ell == 0 {
        return Err(Error::Argument(format!("g = {g} and ell = {ell} must be positive")));
    }
    if z < 2 {
        return Err(Error::Argument(format!("z = {z} must be at least 2")));
    }
    let tuples = binomial_f64(z - 2, g as u64);
    if tuples > TUPLE_BUDGET {
        return Err(Error::Budget(format!(
            "g = {g}, z = {z} needs about {tuples:.3e} tuples (budget {TUPLE_BUDGET:e})"
        )));
    }
    Ok(())
}

/// Distinct primes of every `n < z`, plus `∏_{p|n}(1+1/p)`.
struct DivisorTables {
    /// `offsets[n]..offsets[n+1]` indexes `prime_idx` for `n`.
    offsets: Vec<u32>,
    prime_idx: Vec<u32>,
    /// `1 + 1/p` by prime index.
    factor: Vec<f64>,
    /// `∏_{p|n}(1 + 1/p)`, multiplied in ascending prime order.
    base: Vec<f64>,
}

impl DivisorTables {
    fn new(z: u64) -> Self {
        let n_max = z.max(2) as usize;
        let mut spf = vec![0u32; n_max];
        let mut index_of = vec![u32::MAX; n_max];
        let mut factor = Vec::new();
        for i in 2..n_max {
            if spf[i] == 0 {
                index_of[i] = factor.len() as u32;
                factor.push(1.0 + 1.0 / i as f64);
                for j in (i..n_max).step_by(i) {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                }
            }
        }
        let mut offsets = Vec::with_capacity(n_max + 1);
        let mut prime_idx = Vec::new();
        let mut base = vec![1.0; n_max];
        offsets.push(0);
        for (n, slot) in base.iter_mut().enumerate() {
            let mut m = n;
            let mut b = 1.0;
            while m > 1 {
                let p = spf[m] as usize;
                prime_idx.push(index_of[p]);
                b *= factor[index_of[p] as usize];
                while m % p == 0 {
                    m /= p;
                }
            }
            *slot = b;
            offsets.push(prime_idx.len() as u32);
        }
        Self { offsets, prime_idx, factor, base }
    }

    #[inline]
    fn primes_of(&self, n: u64) -> &[u32] {
        let n = n as usize;
        &self.prime_idx[self.offsets[n] as usize..self.offsets[n + 1] as usize]
    }

    fn prime_count(&self) -> usize {
        self.factor.len()
    }
}

/// `Σ_{1<h<z} h⁻¹ ∏_{p|h}(1 + 1/p)^e`, compensated, ascending `h`.
pub fn single_weighted_sum(z: u64, e: u32) -> Result<f64> {
    if z < 2 {
        return Err(Error::Argument(format!("z = {z} must be at least 2")));
    }
    let tables = DivisorTables::new(z);
    Ok(compensated_sum(
        (2..z).map(|h| tables.base[h as usize].powi(e as i32) / h as f64),
    ))
}

/// `Σ_{1<=d<z} μ²(d) L^{ω(d)} / d²`.
pub fn squarefree_series(z: u64, big_l: f64) -> f64 {
    let n_max = z.max(2) as usize;
    // μ² and ω by sieving
    let mut omega = vec![0u32; n_max];
    let mut squarefree = vec![true; n_max];
    for p in 2..n_max {
        if omega[p] == 0 && squarefree[p] {
            // p is prime iff untouched so far
            let is_prime = (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0);
            if !is_prime {
                continue;
            }
            for j in (p..n_max).step_by(p) {
                omega[j] += 1;
            }
            if let Some(pp) = p.checked_mul(p) {
                for j in (pp..n_max).step_by(pp) {
                    squarefree[j] = false;
                }
            }
        }
    }
    compensated_sum(
        (1..n_max)
            .filter(|&d| squarefree[d])
            .map(|d| big_l.powi(omega[d] as i32) / (d as f64 * d as f64)),
    )
}

/// The `A_{r,s}` step of the moment estimate:
/// `(Σ_{1<a<b<z} f(b−a)/(ab), ln z · Σ_{1<=h<z} f(h)/h)` with
/// `f(h) = ∏_{p|h}(1+1/p)^e`. The first never exceeds the second.
pub fn difference_moment_chain(z: u64, e: u32) -> Result<(f64, f64)> {
    if z < 2 {
        return Err(Error::Argument(format!("z = {z} must be at least 2")));
    }
    let tables = DivisorTables::new(z);
    let f = |h: u64| tables.base[h as usize].powi(e as i32);
    let rows: Vec<CompensatedSum> = (2..z)
        .into_par_iter()
        .map(|b| (2..b).map(|a| f(b - a) / (a as f64 * b as f64)).collect())
        .collect();
    let mut lhs = CompensatedSum::new();
    for r in &rows {
        lhs.merge(r);
    }
    let rhs = (z as f64).ln() * compensated_sum((1..z).map(|h| f(h) / h as f64));
    Ok((lhs.value(), rhs))
}

/// Cumulative sums of `W` and the Hölder moments.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSums {
    pub w: f64,
    /// `Σ (h₁⋯h_g)⁻¹ A_j^G`, `j = 1..g`.
    pub aj: Vec<f64>,
    /// `Σ (h₁⋯h_g)⁻¹ A_{r,s}^G`, ordered `(r,s) = (2,1), (3,1), (3,2), …`.
    pub ars: Vec<f64>,
}

/// Position of `(r, s)`, `1 <= s < r <= g`, in [`MomentSums::ars`].
pub fn pair_index(r: u32, s: u32) -> usize {
    ((r - 1) * (r - 2) / 2 + (s - 1)) as usize
}

#[derive(Clone)]
struct BucketAcc {
    w: CompensatedSum,
    aj: Vec<CompensatedSum>,
    ars: Vec<CompensatedSum>,
}

impl BucketAcc {
    fn new(g: usize, moments: bool) -> Self {
        let (na, nr) = if moments { (g, g * (g - 1) / 2) } else { (0, 0) };
        Self {
            w: CompensatedSum::new(),
            aj: vec![CompensatedSum::new(); na],
            ars: vec![CompensatedSum::new(); nr],
        }
    }

    fn merge(&mut self, other: &BucketAcc) {
        self.w.merge(&other.w);
        for (a, b) in self.aj.iter_mut().zip(&other.aj) {
            a.merge(b);
        }
        for (a, b) in self.ars.iter_mut().zip(&other.ars) {
            a.merge(b);
        }
    }

    fn snapshot(&self) -> MomentSums {
        MomentSums {
            w: self.w.value(),
            aj: self.aj.iter().map(CompensatedSum::value).collect(),
            ars: self.ars.iter().map(CompensatedSum::value).collect(),
        }
    }
}

struct TupleWalk<'a> {
    tables: &'a DivisorTables,
    g: usize,
    ell: i32,
    /// `∏_{p|n}(1+1/p)^{Gℓ}` per `n`, only when moments are wanted.
    powered: Option<&'a [f64]>,
    counts: Vec<u16>,
    tuple: Vec<u64>,
    acc: BucketAcc,
}

impl TupleWalk<'_> {
    /// Adds `n`'s primes to the union, returning the updated union factor.
    #[inline]
    fn include(&mut self, n: u64, mut value: f64) -> f64 {
        for &pi in self.tables.primes_of(n) {
            let c = &mut self.counts[pi as usize];
            if *c == 0 {
                value *= self.tables.factor[pi as usize];
            }
            *c += 1;
        }
        value
    }

    #[inline]
    fn exclude(&mut self, n: u64) {
        for &pi in self.tables.primes_of(n) {
            self.counts[pi as usize] -= 1;
        }
    }

    /// Places `h` as the next coordinate and updates the union with `h` and
    /// its differences to the earlier coordinates.
    fn push(&mut self, h: u64, value: f64) -> f64 {
        let mut v = self.include(h, value);
        for i in 0..self.tuple.len() {
            v = self.include(h - self.tuple[i], v);
        }
        self.tuple.push(h);
        v
    }

    fn pop(&mut self) {
        let h = self.tuple.pop().unwrap();
        self.exclude(h);
        for i in 0..self.tuple.len() {
            self.exclude(h - self.tuple[i]);
        }
    }

    fn leaf(&mut self, weight: f64, value: f64) {
        self.acc.w.add(weight * value.powi(self.ell));
        if let Some(pw) = self.powered {
            for (j, &h) in self.tuple.iter().enumerate() {
                self.acc.aj[j].add(weight * pw[h as usize]);
            }
            let mut idx = 0;
            for r in 1..self.g {
                for s in 0..r {
                    self.acc.ars[idx].add(weight * pw[(self.tuple[r] - self.tuple[s]) as usize]);
                    idx += 1;
                }
            }
        }
    }

    /// Enumerates the prefix `h₁ < … < h_{g−1} < last` then closes with `last`.
    fn walk(&mut self, start: u64, last: u64, weight: f64, value: f64) {
        if self.tuple.len() == self.g - 1 {
            let v = self.push(last, value);
            self.leaf(weight / last as f64, v);
            self.pop();
            return;
        }
        let remaining = (self.g - 1 - self.tuple.len()) as u64;
        for h in start..last.saturating_sub(remaining - 1) {
            let v = self.push(h, value);
            self.walk(h + 1, last, weight / h as f64, v);
            self.pop();
        }
    }
}

/// Per-largest-element partial sums for every `z <= z_max`.
fn tuple_buckets(g: u32, ell: u32, z_max: u64, moments: bool) -> Vec<BucketAcc> {
    let tables = DivisorTables::new(z_max);
    let big_g = holder_exponent(g) as i32;
    let powered: Option<Vec<f64>> =
        moments.then(|| tables.base.iter().map(|b| b.powi(big_g * ell as i32)).collect());
    let g = g as usize;
    (2..z_max)
        .into_par_iter()
        .map(|last| {
            let mut walk = TupleWalk {
                tables: &tables,
                g,
                ell: ell as i32,
                powered: powered.as_deref(),
                counts: vec![0; tables.prime_count()],
                tuple: Vec::with_capacity(g),
                acc: BucketAcc::new(g, moments),
            };
            if last > g as u64 {
                walk.walk(2, last, 1.0, 1.0);
            }
            walk.acc
        })
        .collect()
}

/// `W_{g,ℓ}(z)` and the moments for every `z` in `2..=z_max`; entry `i`
/// corresponds to `z = i + 2`.
pub fn moment_sweep(g: u32, ell: u32, z_max: u64) -> Result<Vec<MomentSums>> {
    check_args(g, ell, z_max)?;
    sweep(g, ell, z_max, true)
}

/// `W_{g,ℓ}(z)` for every `z` in `2..=z_max`.
pub fn w_sum_sweep(g: u32, ell: u32, z_max: u64) -> Result<Vec<f64>> {
    check_args(g, ell, z_max)?;
    Ok(sweep(g, ell, z_max, false)?.into_iter().map(|m| m.w).collect())
}

fn sweep(g: u32, ell: u32, z_max: u64, moments: bool) -> Result<Vec<MomentSums>> {
    let buckets = tuple_buckets(g, ell, z_max, moments);
    let mut running = BucketAcc::new(g as usize, moments);
    let mut out = Vec::with_capacity(buckets.len() + 1);
    // z = 2: empty index set
    out.push(running.snapshot());
    for b in &buckets {
        running.merge(b);
        out.push(running.snapshot());
    }
    Ok(out)
}

/// `W_{g,ℓ}(z)`.
pub fn w_sum(g: u32, ell: u32, z: u64) -> Result<f64> {
    Ok(*w_sum_sweep(g, ell, z)?.last().unwrap())
}

/// `Σ (h₁⋯h_g)⁻¹ A_j^G` over increasing tuples below `z`, `1 <= j <= g`.
pub fn aj_moment(g: u32, ell: u32, z: u64, j: u32) -> Result<f64> {
    if j == 0 || j > g {
        return Err(Error::Argument(format!("j = {j} outside 1..={g}")));
    }
    Ok(moment_sweep(g, ell, z)?.last().unwrap().aj[j as usize - 1])
}

/// `Σ (h₁⋯h_g)⁻¹ A_{r,s}^G` over increasing tuples below `z`, `1 <= s < r <= g`.
pub fn ars_moment(g: u32, ell: u32, z: u64, r: u32, s: u32) -> Result<f64> {
    if !(1 <= s && s < r && r <= g) {
        return Err(Error::Argument(format!("need 1 <= s < r <= g, got r = {r}, s = {s}")));
    }
    Ok(moment_sweep(g, ell, z)?.last().unwrap().ars[pair_index(r, s)])
}

/// Every quantity in the Hölder step for one `(g, ℓ, z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HolderDiagnostics {
    pub g: u32,
    pub ell: u32,
    /// `G = C(g+1, 2)`.
    pub big_g: u32,
    /// `L = 2^{Gℓ}`.
    pub big_l: BigUint,
    pub z: u64,
    pub w_value: f64,
    pub aj_moments: Vec<f64>,
    pub ars_moments: Vec<f64>,
    /// `∏ (moment)^{1/G}` over all `G` moments.
    pub holder_bound: f64,
    /// Each `aj` moment divided by `(ln z)^g`.
    pub aj_log_ratios: Vec<f64>,
    /// Each `ars` moment divided by `(ln z)^g`.
    pub ars_log_ratios: Vec<f64>,
}

impl HolderDiagnostics {
    fn from_sums(g: u32, ell: u32, z: u64, sums: &MomentSums) -> Self {
        let big_g = holder_exponent(g);
        let holder_bound = sums
            .aj
            .iter()
            .chain(&sums.ars)
            .map(|m| m.powf(1.0 / big_g as f64))
            .product();
        let log_g = (z as f64).ln().powi(g as i32);
        Self {
            g,
            ell,
            big_g,
            big_l: BigUint::one() << (big_g * ell) as usize,
            z,
            w_value: sums.w,
            aj_moments: sums.aj.clone(),
            ars_moments: sums.ars.clone(),
            holder_bound,
            aj_log_ratios: sums.aj.iter().map(|m| m / log_g).collect(),
            ars_log_ratios: sums.ars.iter().map(|m| m / log_g).collect(),
        }
    }

    /// `w_value <= holder_bound·(1 + 1e-9)`.
    pub fn inequality_holds(&self) -> bool {
        self.w_value <= self.holder_bound * (1.0 + 1e-9)
    }
}

pub fn holder_verify(g: u32, ell: u32, z: u64) -> Result<HolderDiagnostics> {
    let sums = moment_sweep(g, ell, z)?;
    Ok(HolderDiagnostics::from_sums(g, ell, z, sums.last().unwrap()))
}

/// Diagnostics for every `z` in `2..=z_max` from a single enumeration.
pub fn holder_sweep(g: u32, ell: u32, z_max: u64) -> Result<Vec<HolderDiagnostics>> {
    let sums = moment_sweep(g, ell, z_max)?;
    Ok(sums
        .iter()
        .enumerate()
        .map(|(i, s)| HolderDiagnostics::from_sums(g, ell, i as u64 + 2, s))
        .collect())
}

/// Naive majorant `(max_{h<z} ∏_{p|h}(1+1/p))^{Gℓ} · (Σ_{1<h<z} 1/h)^g / g!`.
pub fn naive_majorant(g: u32, ell: u32, z: u64) -> Result<f64> {
    check_args(g, ell, z)?;
    let tables = DivisorTables::new(z);
    let max_base = (2..z as usize).map(|h| tables.base[h]).fold(1.0, f64::max);
    let harmonic = compensated_sum((2..z).map(|h| 1.0 / h as f64));
    let factorial: f64 = (1..=g).map(f64::from).product();
    Ok(max_base.powi((holder_exponent(g) * ell) as i32) * harmonic.powi(g as i32) / factorial)
}

fn trial_factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Both sides of `∏_{p|h}(1 + L/p) = Σ_{d|h} μ²(d) L^{ω(d)} / d` as exact rationals.
pub fn mobius_expansion_check(h: u64, big_l: u64) -> Result<(BigRational, BigRational)> {
    if h < 2 {
        return Err(Error::Argument(format!("h = {h} must be at least 2")));
    }
    let l = BigInt::from(big_l);
    let pairs = trial_factor(h);
    let lhs = pairs.iter().fold(BigRational::one(), |acc, &(p, _)| {
        acc * (BigRational::one() + BigRational::new(l.clone(), BigInt::from(p)))
    });

    let mut divisors = vec![1u64];
    for &(p, e) in &pairs {
        let len = divisors.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                divisors.push(divisors[i] * pk);
            }
        }
    }
    divisors.sort_unstable();
    let mut rhs = BigRational::zero();
    for d in divisors {
        let f = trial_factor(d);
        if f.iter().any(|&(_, e)| e > 1) {
            continue;
        }
        rhs += BigRational::new(l.pow(f.len() as u32), BigInt::from(d));
    }
    Ok((lhs, rhs))
}
