//! Dickman's function ρ and the density thresholds built on it.
//!
//! Integrating `uρ'(u) = −ρ(u−1)` from 1 to `u` and using `(tρ(t))' = ρ(t) + tρ'(t)`
//! gives `uρ(u) = ∫_{u−1}^{u} ρ(t) dt`. The table is built forward on a grid of
//! spacing `1/N`; since `1/step` is an integer both ends of `[u−1, u]` are grid
//! points, so the quadrature only ever touches stored values. The integral is
//! split at the integer inside `[u−1, u]` because ρ has a kink at 1 and its
//! higher derivatives jump at every later integer.

use crate::error::{Error, Result};
use crate::summation::CompensatedSum;

pub const DEFAULT_STEP: f64 = 1.0 / 1024.0;
pub const DEFAULT_U_MAX: f64 = 10.0;
/// Coarsest admissible spacing.
pub const MAX_STEP: f64 = 1.0 / 256.0;

#[derive(Debug, Clone, PartialEq)]
pub struct RhoTable {
    per_unit: usize,
    values: Vec<f64>,
}

/// Composite rule on `n` equal intervals: Simpson for even `n`, 3/8 on the first
/// three then Simpson for odd `n ≥ 3`, trapezoid for `n = 1`.
fn quadrature(f: &[f64], h: f64) -> f64 {
    let n = f.len() - 1;
    match n {
        0 => 0.0,
        1 => 0.5 * h * (f[0] + f[1]),
        _ if n % 2 == 0 => simpson(f, h),
        _ => 3.0 * h / 8.0 * (f[0] + 3.0 * f[1] + 3.0 * f[2] + f[3]) + simpson(&f[3..], h),
    }
}

fn simpson(f: &[f64], h: f64) -> f64 {
    let n = f.len() - 1;
    if n == 0 {
        return 0.0;
    }
    let mut acc = CompensatedSum::new();
    acc.add(f[0]);
    acc.add(f[n]);
    for (i, &v) in f.iter().enumerate().take(n).skip(1) {
        acc.add(if i % 2 == 1 { 4.0 * v } else { 2.0 * v });
    }
    acc.value() * h / 3.0
}

/// Weight of the final node in [`quadrature`], in units of `h`.
fn last_weight(n: usize) -> f64 {
    match n {
        0 => 0.0,
        1 => 0.5,
        3 => 3.0 / 8.0,
        _ => 1.0 / 3.0,
    }
}

impl RhoTable {
    /// Builds ρ on `0, step, …, ⌊u_max/step⌋·step`.
    pub fn build(u_max: f64, step: f64) -> Result<Self> {
        if u_max.is_nan() || u_max < 2.0 || !u_max.is_finite() {
            return Err(Error::Argument(format!("u_max = {u_max} must be at least 2")));
        }
        if !(step > 0.0 && step <= MAX_STEP) {
            return Err(Error::Precision(format!("step {step} is coarser than {MAX_STEP}")));
        }
        let inv = 1.0 / step;
        if inv.fract() != 0.0 {
            return Err(Error::Precision(format!("1/step = {inv} must be an integer")));
        }
        let n = inv as usize;
        let last = (u_max * inv).floor() as usize;
        let h = step;
        let mut values = vec![1.0; last + 1];
        let mut scratch = Vec::with_capacity(n + 1);
        for i in n + 1..=last {
            let u = i as f64 * h;
            // split point: the integer in (u−1, u), or u−1 itself when u is an integer
            let kink = if i % n == 0 { i - n } else { (i / n) * n };
            let head = quadrature(&values[i - n..=kink], h);
            scratch.clear();
            scratch.extend_from_slice(&values[kink..i]);
            scratch.push(0.0);
            let tail = quadrature(&scratch, h);
            let w = last_weight(i - kink) * h;
            values[i] = (head + tail) / (u - w);
        }
        Ok(Self { per_unit: n, values })
    }

    pub fn step(&self) -> f64 {
        1.0 / self.per_unit as f64
    }

    /// Largest tabulated argument.
    pub fn u_max(&self) -> f64 {
        (self.values.len() - 1) as f64 / self.per_unit as f64
    }

    /// ρ at the grid points `0, step, …`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// ρ(u) by 4-point Lagrange interpolation inside the unit interval holding `u`.
    pub fn rho(&self, u: f64) -> Result<f64> {
        if u.is_nan() || u < 0.0 || u > self.u_max() {
            return Err(Error::Range(format!("u = {u} outside [0, {}]", self.u_max())));
        }
        if u <= 1.0 {
            return Ok(1.0);
        }
        let n = self.per_unit;
        let x = u * n as f64;
        let i = x.floor() as usize;
        if x == i as f64 {
            return Ok(self.values[i]);
        }
        let seg_lo = (i / n) * n;
        let seg_hi = (seg_lo + n).min(self.values.len() - 1);
        let start = i.saturating_sub(1).max(seg_lo).min(seg_hi.saturating_sub(3));
        let mut total = 0.0;
        for a in start..start + 4 {
            let mut w = 1.0;
            for b in start..start + 4 {
                if a != b {
                    w *= (x - b as f64) / (a as f64 - b as f64);
                }
            }
            total += w * self.values[a];
        }
        Ok(total)
    }

    /// `∫_a^b ρ(t)/t dt` by Simpson's rule at roughly the table spacing,
    /// split at integers.
    pub fn rho_over_t_integral(&self, a: f64, b: f64) -> Result<f64> {
        if !(a >= 0.0 && a <= b && b <= self.u_max()) {
            return Err(Error::Range(format!("need 0 <= a <= b <= {}, got [{a}, {b}]", self.u_max())));
        }
        if a == 0.0 {
            return Err(Error::Domain("ρ(t)/t is not integrable at t = 0".into()));
        }
        if a == b {
            return Ok(0.0);
        }
        let mut cuts = vec![a];
        let mut m = a.floor() + 1.0;
        while m < b {
            cuts.push(m);
            m += 1.0;
        }
        cuts.push(b);
        let mut total = CompensatedSum::new();
        for w in cuts.windows(2) {
            let (c, d) = (w[0], w[1]);
            let mut k = ((d - c) * self.per_unit as f64).ceil().max(2.0) as usize;
            k += k % 2;
            let h = (d - c) / k as f64;
            let f = (0..=k)
                .map(|j| {
                    // keep nodes inside [c, d] despite rounding
                    let t = if j == k { d } else { c + j as f64 * h };
                    self.rho(t).map(|r| r / t)
                })
                .collect::<Result<Vec<_>>>()?;
            total.add(simpson(&f, h));
        }
        Ok(total.value())
    }
}

pub fn build_rho_table(u_max: f64, step: f64) -> Result<RhoTable> {
    RhoTable::build(u_max, step)
}

/// `1 − ρ(1/θ)` for `0 < θ <= 1`.
pub fn pomerance_density(table: &RhoTable, theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::Argument(format!("θ = {theta} outside (0, 1]")));
    }
    Ok(1.0 - table.rho(1.0 / theta)?)
}

/// `θ − 4ρ(1/θ)`.
pub fn theta2_objective(table: &RhoTable, theta: f64) -> Result<f64> {
    Ok(theta - 4.0 * table.rho(1.0 / theta)?)
}

/// `θ − 4∫_{1/θ−1}^{1/θ} ρ(t)/t dt`.
pub fn theta1_objective(table: &RhoTable, theta: f64) -> Result<f64> {
    let u = 1.0 / theta;
    Ok(theta - 4.0 * table.rho_over_t_integral(u - 1.0, u)?)
}

pub const THETA_BRACKET: (f64, f64) = (0.25, 0.45);
const ROOT_TOLERANCE: f64 = 1e-10;

fn bisect(f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let (mut lo, mut hi) = THETA_BRACKET;
    let (f_lo, f_hi) = (f(lo)?, f(hi)?);
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::Solver(format!(
            "no sign change on [{lo}, {hi}]: f = {f_lo:e}, {f_hi:e}"
        )));
    }
    let lo_positive = f_lo > 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid)?;
        if v == 0.0 {
            return Ok(mid);
        }
        if (v > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root = 0.5 * (lo + hi);
    let residual = f(root)?;
    if residual.abs() > ROOT_TOLERANCE {
        return Err(Error::Solver(format!("residual {residual:e} at θ = {root}")));
    }
    Ok(root)
}

fn require_cover(table: &RhoTable) -> Result<()> {
    if table.u_max() < 4.0 {
        return Err(Error::Range(format!("table stops at {} < 4", table.u_max())));
    }
    Ok(())
}

/// Root of [`theta2_objective`] on [`THETA_BRACKET`].
pub fn solve_theta2(table: &RhoTable) -> Result<f64> {
    require_cover(table)?;
    bisect(|t| theta2_objective(table, t))
}

/// Root of [`theta1_objective`] on [`THETA_BRACKET`].
pub fn solve_theta1(table: &RhoTable) -> Result<f64> {
    require_cover(table)?;
    bisect(|t| theta1_objective(table, t))
}

#[cfg(test)]
mod tests {
    use super::*;

    const RHO_3: f64 = 0.048_608_388_291_131_6;

    fn table() -> RhoTable {
        RhoTable::build(DEFAULT_U_MAX, DEFAULT_STEP).unwrap()
    }

    #[test]
    fn rho_examples() {
        let t = table();
        assert_eq!(t.rho(0.5).unwrap(), 1.0);
        assert!((t.rho(2.0).unwrap() - (1.0 - 2f64.ln())).abs() < 1e-8);
        assert!((t.rho(3.0).unwrap() - RHO_3).abs() < 1e-6);
        assert!(t.rho(10.5).is_err());
    }

    #[test]
    fn first_segment_closed_form() {
        let t = table();
        for (i, &v) in t.values().iter().enumerate().take(2049).skip(1024) {
            let u = i as f64 / 1024.0;
            assert!((v - (1.0 - u.ln())).abs() <= 1e-9, "u = {u}");
        }
        assert!((t.rho(1.3).unwrap() - (1.0 - 1.3f64.ln())).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_steps() {
        assert!(matches!(RhoTable::build(5.0, 0.01), Err(Error::Precision(_))));
        assert!(matches!(RhoTable::build(5.0, 0.003), Err(Error::Precision(_))));
        assert!(matches!(RhoTable::build(1.5, DEFAULT_STEP), Err(Error::Argument(_))));
    }

    #[test]
    fn density_examples() {
        let t = table();
        assert!((pomerance_density(&t, 0.5).unwrap() - 2f64.ln()).abs() < 1e-7);
        assert_eq!(pomerance_density(&t, 1.0).unwrap(), 0.0);
        assert!((pomerance_density(&t, 1.0 / 3.0).unwrap() - (1.0 - RHO_3)).abs() < 1e-6);
        assert!(matches!(pomerance_density(&t, 0.05), Err(Error::Range(_))));
    }

    #[test]
    fn integral_examples() {
        let t = table();
        let l2 = 2f64.ln();
        assert!((t.rho_over_t_integral(1.0, 2.0).unwrap() - (l2 - l2 * l2 / 2.0)).abs() < 1e-7);
        assert_eq!(t.rho_over_t_integral(2.5, 2.5).unwrap(), 0.0);
        assert!(matches!(t.rho_over_t_integral(0.0, 1.0), Err(Error::Domain(_))));
        let fine = RhoTable::build(4.0, 1.0 / 16384.0).unwrap();
        let reference = fine.rho_over_t_integral(2.0, 3.0).unwrap();
        assert!((t.rho_over_t_integral(2.0, 3.0).unwrap() - reference).abs() < 1e-6);
        assert!((fine.rho(3.0).unwrap() - RHO_3).abs() < 1e-12);
    }

    #[test]
    fn thresholds() {
        let t = table();
        let th2 = solve_theta2(&t).unwrap();
        let th1 = solve_theta1(&t).unwrap();
        assert!((th2 - 0.3734).abs() < 5e-4, "{th2}");
        assert!((th1 - 0.3517).abs() < 5e-4, "{th1}");
        assert!(theta2_objective(&t, th2).unwrap().abs() <= 1e-10);
        assert!(theta1_objective(&t, th1).unwrap().abs() <= 1e-10);
        assert!(th1 < th2);
        // the objective decreases through the bracket
        assert!(theta2_objective(&t, 0.25).unwrap() > 0.0);
        assert!(theta2_objective(&t, 0.45).unwrap() < 0.0);
        let short = RhoTable::build(3.0, DEFAULT_STEP).unwrap();
        assert!(matches!(solve_theta2(&short), Err(Error::Range(_))));
    }

    #[test]
    fn delay_equation_residual() {
        let t = table();
        let d = 2.0 * t.step();
        let mut u = 1.0 + 1.0 / 128.0;
        while u < t.u_max() - 0.05 {
            if u > 1.05 {
                let deriv = (t.rho(u + d).unwrap() - t.rho(u - d).unwrap()) / (2.0 * d);
                let r = u * deriv + t.rho(u - 1.0).unwrap();
                assert!(r.abs() <= 1e-5, "u = {u}: {r:e}");
            }
            u += 1.0 / 64.0;
        }
    }

    #[test]
    fn monotone_and_convergent() {
        let t = table();
        let v = t.values();
        for i in 1025..v.len() {
            assert!(v[i] < v[i - 1] && v[i] > 0.0);
            assert!(v[i] < v[i - 1024]);
        }
        let half = RhoTable::build(4.0, DEFAULT_STEP / 2.0).unwrap();
        for u in [2.0, 3.0, 4.0] {
            assert!((t.rho(u).unwrap() - half.rho(u).unwrap()).abs() <= 1e-8);
        }
    }
}
