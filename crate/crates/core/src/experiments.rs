//! Experiment drivers and their record format.
//!
//! Each driver returns [`ExperimentRecord`]s whose raw fields are the computed
//! quantities and whose derived fields are ratios and flags built from them.
//! Records serialize to CSV (one header row, stable column order) or JSON lines.

use std::cmp::Ordering;
use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use crate::dickman::{pomerance_density, RhoTable};
use crate::error::{Error, Result};
use crate::exact::cmp_products;
use crate::forms::PrimeWindow;
use crate::primes::{PrimeTables, SieveCache};
use crate::shifted::{t_k_theta_fast, t_prime_theta, t_theta, Theta};
use crate::summation::{compensated_sum, par_sum_by};

/// Significant digits kept for every emitted real.
pub const REAL_DIGITS: usize = 12;

/// Rounds to [`REAL_DIGITS`] significant digits.
pub fn round_real(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{:.*e}", REAL_DIGITS - 1, v).parse().unwrap_or(v)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i128),
    Real(f64),
    Text(String),
    Flag(bool),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Real(v) => write!(f, "{}", round_real(*v)),
            Value::Text(s) => f.write_str(s),
            Value::Flag(b) => write!(f, "{b}"),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Value::Int(v) => match i64::try_from(*v) {
                Ok(v) => s.serialize_i64(v),
                Err(_) => s.serialize_str(&v.to_string()),
            },
            Value::Real(v) if v.is_finite() => s.serialize_f64(round_real(*v)),
            Value::Real(_) => s.serialize_none(),
            Value::Text(t) => s.serialize_str(t),
            Value::Flag(b) => s.serialize_bool(*b),
        }
    }
}

impl From<u64> for Value {
    fn from(v: u64) -> Self {
        Value::Int(v.into())
    }
}

impl From<u32> for Value {
    fn from(v: u32) -> Self {
        Value::Int(v.into())
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Real(v)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Flag(v)
    }
}

impl From<Theta> for Value {
    fn from(v: Theta) -> Self {
        Value::Text(v.to_string())
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

pub type Fields = Vec<(String, Value)>;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub experiment: String,
    pub inputs: Fields,
    pub raw: Fields,
    pub derived: Fields,
}

struct OrderedFields<'a>(&'a Fields);

impl Serialize for OrderedFields<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl Serialize for ExperimentRecord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(4))?;
        map.serialize_entry("experiment", &self.experiment)?;
        map.serialize_entry("inputs", &OrderedFields(&self.inputs))?;
        map.serialize_entry("raw", &OrderedFields(&self.raw))?;
        map.serialize_entry("derived", &OrderedFields(&self.derived))?;
        map.end()
    }
}

impl ExperimentRecord {
    pub fn new(experiment: &str) -> Self {
        Self { experiment: experiment.to_string(), inputs: Vec::new(), raw: Vec::new(), derived: Vec::new() }
    }

    pub fn input(mut self, label: &str, value: impl Into<Value>) -> Self {
        self.inputs.push((label.to_string(), value.into()));
        self
    }

    pub fn raw(mut self, label: &str, value: impl Into<Value>) -> Self {
        self.raw.push((label.to_string(), value.into()));
        self
    }

    pub fn derived(mut self, label: &str, value: impl Into<Value>) -> Self {
        self.derived.push((label.to_string(), value.into()));
        self
    }

    /// Looks a label up in inputs, raw and derived fields, in that order.
    pub fn get(&self, label: &str) -> Option<&Value> {
        self.inputs
            .iter()
            .chain(&self.raw)
            .chain(&self.derived)
            .find(|(k, _)| k == label)
            .map(|(_, v)| v)
    }

    /// Real or integer field as `f64`.
    pub fn number(&self, label: &str) -> Option<f64> {
        match self.get(label)? {
            Value::Int(v) => Some(*v as f64),
            Value::Real(v) => Some(*v),
            _ => None,
        }
    }

    pub fn flag(&self, label: &str) -> Option<bool> {
        match self.get(label)? {
            Value::Flag(b) => Some(*b),
            _ => None,
        }
    }

    fn columns(&self) -> Vec<&str> {
        std::iter::once("experiment")
            .chain(self.inputs.iter().chain(&self.raw).chain(&self.derived).map(|(k, _)| k.as_str()))
            .collect()
    }

    fn cells(&self) -> Vec<String> {
        std::iter::once(self.experiment.clone())
            .chain(self.inputs.iter().chain(&self.raw).chain(&self.derived).map(|(_, v)| v.to_string()))
            .collect()
    }
}

/// CSV with the first record's labels as header. All records must share it.
pub fn write_csv<W: Write>(out: W, records: &[ExperimentRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if let Some(first) = records.first() {
        let header = first.columns();
        w.write_record(&header)?;
        for r in records {
            if r.columns() != header {
                return Err(Error::Format(format!(
                    "record columns {:?} differ from header {:?}",
                    r.columns(),
                    header
                )));
            }
            w.write_record(r.cells())?;
        }
    }
    w.flush()?;
    Ok(())
}

/// One JSON object per line.
pub fn write_json_lines<W: Write>(mut out: W, records: &[ExperimentRecord]) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// `S(x) = Σ_{(x/2)^θ<p<=x^{1/k}} p⁻¹ (Σ_{q<=x, q≡1 (p)} 1/q)^{k−1}`.
pub fn s_of_x(sieve: &SieveCache, x: u64, k: u32, theta: Theta) -> Result<f64> {
    sieve.ensure_covers(x)?;
    let window = PrimeWindow::new(x, k, theta)?;
    if !window.nonempty {
        return Ok(0.0);
    }
    let outer: Vec<u64> = sieve.iter_range(window.lower, window.upper).collect();
    let inner: Vec<f64> = outer
        .par_iter()
        .map(|&p| sieve.recip_prime_sum_ap(x, p, 1))
        .collect::<Result<_>>()?;
    let terms: Vec<(u64, f64)> = outer.into_iter().zip(inner).collect();
    Ok(par_sum_by(&terms, |&(p, s)| s.powi(k as i32 - 1) / p as f64))
}

/// Elementary symmetric sums `e_1..=e_n` of `values`.
fn elementary_symmetric(values: &[f64], n: usize) -> Vec<f64> {
    let mut e = vec![0.0; n + 1];
    e[0] = 1.0;
    for &v in values {
        for j in (1..=n).rev() {
            e[j] += e[j - 1] * v;
        }
    }
    e
}

/// Per outer prime `p`: the reciprocals `1/h` for `1 <= h` with `ph+1` prime,
/// split at `h < x/p` and at the box edge `h < 2^θ x^{1−θ}`.
struct OuterPrimeTerms {
    p: u64,
    below_x_over_p: Vec<f64>,
    below_box: Vec<f64>,
}

fn below_box_edge(h: u64, x: u64, theta: Theta) -> bool {
    // h < 2^θ x^{1−θ}  ⟺  h^den < 2^num · x^{den−num}
    let (num, den) = (theta.num(), theta.den());
    cmp_products(&[(h, den)], &[(2, num), (x, den - num)]) == Ordering::Less
}

/// The chain `S(x) <= (3.3 majorant) <= box sum`, and the sorted-tuple form.
///
/// * `s`: `S(x)`.
/// * `majorant`: `Σ_p p^{−k} (Σ_{1<=h<x/p, ph+1 prime} 1/h)^{k−1}`.
/// * `box_sum`: the same with `h` running over the common box `h < 2^θ x^{1−θ}`.
/// * `sorted_sum`: `Σ_p p^{−k} Σ_{g=1}^{k−1} e_g(1/h)` over the box, i.e. the
///   sum over strictly increasing tuples of every length below `k`.
///
/// `c_sym = box_sum / sorted_sum` is the symmetry constant.
pub fn rearrangement_report(sieve: &SieveCache, x: u64, k: u32, theta: Theta) -> Result<ExperimentRecord> {
    if k < 2 {
        return Err(Error::Argument(format!("k = {k} must be at least 2")));
    }
    if x > 100_000 {
        return Err(Error::Budget(format!("x = {x} exceeds the direct-sum limit 10^5")));
    }
    let s = s_of_x(sieve, x, k, theta)?;
    let window = PrimeWindow::new(x, k, theta)?;
    let outer: Vec<u64> = if window.nonempty {
        sieve.iter_range(window.lower, window.upper).collect()
    } else {
        Vec::new()
    };
    let box_edge = crate::exact::largest_where(
        2f64.powf(theta.as_real()) * (x as f64).powf(1.0 - theta.as_real()),
        |h| h == 0 || below_box_edge(h, x, theta),
    );
    if let Some(&p_max) = outer.last() {
        sieve.ensure_covers(p_max * box_edge + 1)?;
    }
    let terms: Vec<OuterPrimeTerms> = outer
        .par_iter()
        .map(|&p| {
            let hs: Vec<u64> = (1..=box_edge).filter(|&h| sieve.is_prime(p * h + 1)).collect();
            OuterPrimeTerms {
                p,
                below_x_over_p: hs.iter().filter(|&&h| p * h < x).map(|&h| 1.0 / h as f64).collect(),
                below_box: hs.iter().map(|&h| 1.0 / h as f64).collect(),
            }
        })
        .collect();

    let km1 = k as i32 - 1;
    let weight = |p: u64| (p as f64).powi(-(k as i32));
    let majorant = compensated_sum(
        terms.iter().map(|t| weight(t.p) * compensated_sum(t.below_x_over_p.iter().copied()).powi(km1)),
    );
    let box_sum = compensated_sum(
        terms.iter().map(|t| weight(t.p) * compensated_sum(t.below_box.iter().copied()).powi(km1)),
    );
    let sorted_sum = compensated_sum(terms.iter().map(|t| {
        let mut e = elementary_symmetric(&t.below_box, k as usize - 1);
        // same summation as the box sum, so k = 2 compares bit for bit
        e[1] = compensated_sum(t.below_box.iter().copied());
        weight(t.p) * compensated_sum(e[1..].iter().copied())
    }));
    let c_sym = if sorted_sum > 0.0 { box_sum / sorted_sum } else { 0.0 };

    Ok(ExperimentRecord::new("rearrange")
        .input("x", x)
        .input("k", k)
        .input("theta", theta)
        .raw("s", s)
        .raw("majorant", majorant)
        .raw("box_sum", box_sum)
        .raw("sorted_sum", sorted_sum)
        .derived("c_sym", c_sym)
        .derived("s_le_majorant", s <= majorant * (1.0 + 1e-12))
        .derived("majorant_le_box", majorant <= box_sum * (1.0 + 1e-12)))
}

/// `T_{k,θ}(x)·(ln x)² / x^{1−θ(k−1)}` with running extremes, one record per `x`.
pub fn theorem1_ratio_table(tables: &PrimeTables, k: u32, theta: Theta, x_grid: &[u64]) -> Result<Vec<ExperimentRecord>> {
    let mut out = Vec::with_capacity(x_grid.len());
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &x in x_grid {
        let count = t_k_theta_fast(tables, x, k, theta)?.ordered_count;
        let xf = x as f64;
        let ratio = if count == 0 {
            0.0
        } else {
            count as f64 * xf.ln().powi(2) / xf.powf(1.0 - theta.as_real() * (k as f64 - 1.0))
        };
        lo = lo.min(ratio);
        hi = hi.max(ratio);
        out.push(
            ExperimentRecord::new("ratio")
                .input("x", x)
                .input("k", k)
                .input("theta", theta)
                .raw("t_k", count)
                .derived("ratio", ratio)
                .derived("running_min", lo)
                .derived("running_max", hi),
        );
    }
    Ok(out)
}

/// `T_θ(x)/π(x)` and `T'_θ(x)/π(x)` against `1 − ρ(1/θ)`, one record per `x`.
pub fn density_table(tables: &PrimeTables, rho: &RhoTable, theta: Theta, x_grid: &[u64]) -> Result<Vec<ExperimentRecord>> {
    let reference = pomerance_density(rho, theta.as_real())?;
    x_grid
        .iter()
        .map(|&x| {
            let pi = tables.sieve().prime_count(x)?;
            let t = t_theta(tables, x, theta)?;
            let tp = t_prime_theta(tables, x, theta)?;
            let frac = |n: u64| if pi == 0 { 0.0 } else { n as f64 / pi as f64 };
            Ok(ExperimentRecord::new("density")
                .input("x", x)
                .input("theta", theta)
                .raw("pi", pi)
                .raw("t_theta", t)
                .raw("t_prime_theta", tp)
                .derived("t_theta_density", frac(t))
                .derived("t_prime_theta_density", frac(tp))
                .derived("reference", reference))
        })
        .collect()
}

/// `Σ_{q<=x, q≡1 (p)} 1/q` against `(ln ln x − ln ln p)/p` and `(ln ln x)/p`,
/// one record per `p`.
pub fn ap_recip_heuristic_table(sieve: &SieveCache, x: u64, p_list: &[u64]) -> Result<Vec<ExperimentRecord>> {
    if x < 3 {
        return Err(Error::Argument(format!("x = {x} must be at least 3")));
    }
    sieve.ensure_covers(x)?;
    let lnln_x = (x as f64).ln().ln();
    let sums: Vec<f64> = p_list
        .par_iter()
        .map(|&p| {
            if p < 2 {
                return Err(Error::Argument(format!("modulus {p} must be at least 2")));
            }
            sieve.recip_prime_sum_ap(x, p, 1)
        })
        .collect::<Result<_>>()?;
    Ok(p_list
        .iter()
        .zip(sums)
        .map(|(&p, exact)| {
            let pf = p as f64;
            let heuristic = (lnln_x - pf.ln().ln()) / pf;
            let brun_titchmarsh = lnln_x / pf;
            let terms = sieve.prime_count_ap(x, p, 1).unwrap_or(0);
            ExperimentRecord::new("apsum")
                .input("x", x)
                .input("p", p)
                .raw("exact", exact)
                .raw("terms", terms)
                .raw("heuristic", heuristic)
                .raw("brun_titchmarsh", brun_titchmarsh)
                .derived("exact_over_heuristic", exact / heuristic)
                .derived("exact_over_brun_titchmarsh", exact / brun_titchmarsh)
        })
        .collect())
}

/// Max/min over the positive entries, `None` when any entry is non-positive.
pub fn band(values: &[f64]) -> Option<f64> {
    if values.is_empty() || values.iter().any(|&v| v.is_nan() || v <= 0.0) {
        return None;
    }
    let hi = values.iter().copied().fold(f64::MIN, f64::max);
    let lo = values.iter().copied().fold(f64::MAX, f64::min);
    Some(hi / lo)
}
