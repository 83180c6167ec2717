//! Weighted polynomial exponential sums `(1/N) Σ_{n ≤ N} ν(n) e^{i P(n) θ}`.
//!
//! Rational frequencies `θ = 2πa/q` are evaluated with exact phases: the
//! residue `a·P(n) mod q` indexes a table of `q` roots of unity. Real
//! frequencies reduce `P(n)·θ/2π` modulo one with an error-free product, so the
//! phase error is set by the representation of `θ`, not by the size of `P(n)`.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::poly::IntPolynomial;
use crate::summation::pairwise_sum_complex;
use crate::weights::WeightTable;

pub const DEFAULT_GRID_DEN: u64 = 4096;

/// Relative slack under which two moduli count as tied; ties go to the smaller `θ`.
pub const TIE_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Frequency {
    /// `θ = 2π num / den`.
    Rational { num: u64, den: u64 },
    Radians(f64),
}

impl Frequency {
    pub fn rational(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(LabError::Domain("frequency denominator must be positive".into()));
        }
        Ok(Frequency::Rational { num: num % den, den })
    }

    pub fn theta(&self) -> f64 {
        match *self {
            Frequency::Rational { num, den } => TAU * num as f64 / den as f64,
            Frequency::Radians(t) => t,
        }
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Frequency::Rational { num, den } => write!(f, "{num}/{den}"),
            Frequency::Radians(t) => write!(f, "{t}"),
        }
    }
}

impl FromStr for Frequency {
    type Err = LabError;

    /// `"a/q"` means `θ = 2πa/q`; a bare number is `θ` in radians.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |e: &dyn fmt::Display| LabError::Parse(format!("bad frequency `{s}`: {e}"));
        match s.split_once('/') {
            Some((a, q)) => {
                let a: u64 = a.trim().parse().map_err(|e| bad(&e))?;
                let q: u64 = q.trim().parse().map_err(|e| bad(&e))?;
                Frequency::rational(a, q)
            }
            None => {
                let t: f64 = s.trim().parse().map_err(|e| bad(&e))?;
                if !t.is_finite() {
                    return Err(bad(&"not finite"));
                }
                Ok(Frequency::Radians(t))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FrequencyGrid {
    /// `θ = 2πa/den` for `a = 0..den`, evaluated with exact phases.
    Rational { den: u64 },
    /// `points` equally spaced doubles in `[0, 2π)`, evaluated with floating phases.
    Uniform { points: usize },
}

impl Default for FrequencyGrid {
    fn default() -> Self {
        FrequencyGrid::Rational { den: DEFAULT_GRID_DEN }
    }
}

impl FrequencyGrid {
    pub fn len(&self) -> usize {
        match *self {
            FrequencyGrid::Rational { den } => den as usize,
            FrequencyGrid::Uniform { points } => points,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn frequency(&self, i: usize) -> Frequency {
        match *self {
            FrequencyGrid::Rational { den } => Frequency::Rational { num: i as u64, den },
            FrequencyGrid::Uniform { points } => Frequency::Radians(TAU * i as f64 / points as f64),
        }
    }

    /// Spacing between consecutive grid points in radians.
    pub fn spacing(&self) -> f64 {
        TAU / self.len() as f64
    }
}

fn roots_table(den: u64) -> Vec<Complex64> {
    (0..den)
        .map(|t| {
            let (s, c) = (TAU * t as f64 / den as f64).sin_cos();
            Complex64::new(c, s)
        })
        .collect()
}

/// `frac(x · t)` for an exact integer `x`, using an error-free product for the
/// high part.
fn frac_of_product(x: i128, t: f64) -> f64 {
    let hi = x as f64;
    let lo = (x - hi as i128) as f64;
    let p = hi * t;
    let err = hi.mul_add(t, -p);
    let g = (p - p.floor()) + err + lo * t;
    g - g.floor()
}

fn check_args(table: &WeightTable, n: u64) -> Result<()> {
    if n == 0 {
        return Err(LabError::Domain("N must be at least 1".into()));
    }
    table.check_range(n)
}

fn unit(turns: f64) -> Complex64 {
    let (s, c) = (TAU * turns).sin_cos();
    Complex64::new(c, s)
}

/// `(1/N) Σ_{n ≤ N} ν(n) e^{i P(n) θ}`.
pub fn weighted_poly_sum(table: &WeightTable, p: &IntPolynomial, freq: Frequency, n: u64) -> Result<Complex64> {
    check_args(table, n)?;
    let terms: Vec<Complex64> = match freq {
        Frequency::Rational { num, den } => {
            if den == 0 {
                return Err(LabError::Domain("frequency denominator must be positive".into()));
            }
            let roots = roots_table(den);
            let a = (num % den) as u128;
            (1..=n)
                .filter(|&m| table.get(m) != 0)
                .map(|m| {
                    let t = (a * p.eval_mod_unchecked(m, den) as u128 % den as u128) as usize;
                    roots[t] * table.get(m) as f64
                })
                .collect()
        }
        Frequency::Radians(theta) => {
            let t = theta / TAU;
            (1..=n)
                .filter(|&m| table.get(m) != 0)
                .map(|m| {
                    let value = p
                        .eval_i128(m as i64)
                        .ok_or_else(|| LabError::Domain(format!("P({m}) overflows 128 bits")))?;
                    Ok(unit(frac_of_product(value, t)) * table.get(m) as f64)
                })
                .collect::<Result<_>>()?
        }
    };
    Ok(pairwise_sum_complex(&terms) / n as f64)
}

/// The sum at every point of `grid`, in grid order.
///
/// For a rational grid the weights are first bucketed by `P(n) mod q` into
/// exact integer counts `c_r`; then `S(a) = (1/N) Σ_r c_r e^{2πi·ar/q}`.
pub fn grid_sums(table: &WeightTable, p: &IntPolynomial, grid: FrequencyGrid, n: u64) -> Result<Vec<Complex64>> {
    check_args(table, n)?;
    if grid.is_empty() {
        return Err(LabError::Domain("frequency grid is empty".into()));
    }
    match grid {
        FrequencyGrid::Rational { den } => {
            let q = den as usize;
            let mut buckets = vec![0i64; q];
            for m in 1..=n {
                let w = table.get(m);
                if w != 0 {
                    buckets[p.eval_mod_unchecked(m, den) as usize] += w as i64;
                }
            }
            let support: Vec<(usize, f64)> = buckets
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(r, &c)| (r, c as f64))
                .collect();
            let roots = roots_table(den);
            let inv_n = 1.0 / n as f64;
            Ok((0..q)
                .into_par_iter()
                .map(|a| {
                    let terms: Vec<Complex64> = support
                        .iter()
                        .map(|&(r, c)| roots[(a as u128 * r as u128 % den as u128) as usize] * c)
                        .collect();
                    pairwise_sum_complex(&terms) * inv_n
                })
                .collect())
        }
        FrequencyGrid::Uniform { points } => (0..points)
            .into_par_iter()
            .map(|i| weighted_poly_sum(table, p, grid.frequency(i), n))
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridMaximum {
    pub index: usize,
    pub frequency: Frequency,
    pub theta: f64,
    pub modulus: f64,
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] * (1.0 + TIE_RTOL) {
            best = i;
        }
    }
    best
}

/// Grid point maximising `|S(θ)|`; near-ties (within [`TIE_RTOL`]) resolve to the smallest `θ`.
pub fn max_over_grid(table: &WeightTable, p: &IntPolynomial, grid: FrequencyGrid, n: u64) -> Result<GridMaximum> {
    let moduli: Vec<f64> = grid_sums(table, p, grid, n)?.iter().map(|z| z.norm()).collect();
    let index = argmax(&moduli);
    let frequency = grid.frequency(index);
    Ok(GridMaximum { index, frequency, theta: frequency.theta(), modulus: moduli[index] })
}

/// Best modulus on a local floating-point grid of `2·subdivisions + 1` points
/// spanning one grid spacing either side of `centre`. The difference from the
/// grid maximum estimates how much of the true supremum the grid misses.
pub fn local_sup_estimate(
    table: &WeightTable,
    p: &IntPolynomial,
    centre: f64,
    spacing: f64,
    subdivisions: usize,
    n: u64,
) -> Result<f64> {
    let sub = subdivisions.max(1) as f64;
    (-(subdivisions as i64)..=subdivisions as i64)
        .into_par_iter()
        .map(|i| {
            let theta = (centre + spacing * i as f64 / sub).rem_euclid(TAU);
            Ok(weighted_poly_sum(table, p, Frequency::Radians(theta), n)?.norm())
        })
        .collect::<Result<Vec<f64>>>()
        .map(|v| v.into_iter().fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayRow {
    pub n: u64,
    pub max_abs: f64,
    pub theta_star: f64,
    /// Local off-grid supremum estimate around `theta_star`.
    pub local_sup: f64,
}

/// Least-squares fit of `ln v = ln C − A ln ln N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayFit {
    pub exponent: f64,
    pub exponent_stderr: f64,
    pub constant: f64,
    pub residuals: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayProfile {
    pub rows: Vec<DecayRow>,
    /// `None` when some maximum is zero and the logarithmic model is undefined.
    pub fit: Option<DecayFit>,
}

pub const LOCAL_SUBDIVISIONS: usize = 8;

pub fn decay_profile(table: &WeightTable, p: &IntPolynomial, grid: FrequencyGrid, ns: &[u64]) -> Result<DecayProfile> {
    if ns.len() < 3 {
        return Err(LabError::Fit(format!("need at least 3 values of N, got {}", ns.len())));
    }
    if ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(LabError::Domain("N list must be strictly increasing".into()));
    }
    if ns[0] < 2 {
        return Err(LabError::Fit("N must be at least 2 for the log-log model".into()));
    }
    let rows = ns
        .iter()
        .map(|&n| {
            let m = max_over_grid(table, p, grid, n)?;
            let local = local_sup_estimate(table, p, m.theta, grid.spacing(), LOCAL_SUBDIVISIONS, n)?;
            Ok(DecayRow { n, max_abs: m.modulus, theta_star: m.theta, local_sup: local.max(m.modulus) })
        })
        .collect::<Result<Vec<_>>>()?;
    let fit = fit_decay(&rows);
    Ok(DecayProfile { rows, fit })
}

fn fit_decay(rows: &[DecayRow]) -> Option<DecayFit> {
    if rows.iter().any(|r| r.max_abs <= 0.0) {
        return None;
    }
    let xs: Vec<f64> = rows.iter().map(|r| (r.n as f64).ln().ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.max_abs.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals: Vec<f64> = xs.iter().zip(&ys).map(|(x, y)| y - (intercept + slope * x)).collect();
    let ssr: f64 = residuals.iter().map(|r| r * r).sum();
    let stderr = if xs.len() > 2 { (ssr / (k - 2.0) / sxx).sqrt() } else { f64::NAN };
    Some(DecayFit { exponent: -slope, exponent_stderr: stderr, constant: intercept.exp(), residuals })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShortIntervalSum {
    pub start: u64,
    pub span: u64,
    pub value: Complex64,
    /// Whether `span ≥ start^{5/8}`, the short-interval regime.
    pub zhan_regime: bool,
}

/// `(1/M) Σ_{N ≤ n < N + M} ν(n) e^{inθ}` over the `M` integers starting at `N`.
pub fn short_interval_sum(table: &WeightTable, freq: Frequency, start: u64, span: u64) -> Result<ShortIntervalSum> {
    if start == 0 || span == 0 {
        return Err(LabError::Domain("start and span must be positive".into()));
    }
    let last = start
        .checked_add(span - 1)
        .ok_or_else(|| LabError::Domain("interval overflows".into()))?;
    table.check_range(last)?;
    let range = start..=last;
    let terms: Vec<Complex64> = match freq {
        Frequency::Rational { num, den } => {
            let roots = roots_table(den);
            range
                .filter(|&m| table.get(m) != 0)
                .map(|m| roots[(num as u128 * m as u128 % den as u128) as usize] * table.get(m) as f64)
                .collect()
        }
        Frequency::Radians(theta) => {
            let t = theta / TAU;
            range
                .filter(|&m| table.get(m) != 0)
                .map(|m| unit(frac_of_product(m as i128, t)) * table.get(m) as f64)
                .collect()
        }
    };
    Ok(ShortIntervalSum {
        start,
        span,
        value: pairwise_sum_complex(&terms) / span as f64,
        zhan_regime: span as f64 >= (start as f64).powf(5.0 / 8.0),
    })
}
