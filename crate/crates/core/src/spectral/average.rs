//! The two routes to `A_N(j) = (1/N) Σ_{n ≤ N} ν(n) f(j + P(n)) g(j + Q(n))`.
//!
//! The spectral route expands `f` and `g` in characters:
//! `A_N(j) = Σ_{k,l} F(f)(k) F(g)(l) D_{N,k,l} χ_{k+l}(j)`. Grouping by
//! `s = k + l` gives `A_N(j) = Σ_s B_s χ_s(j)` with
//! `B_s = Σ_k F(f)(k) F(g)(s - k) D_{N,k,s-k}`, so `A_N` is the inverse
//! transform of `B` and `(1/J) Σ_j |A_N(j)|² = Σ_s |B_s|²`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::kernel::{d_coefficients, DCoefficients};
use super::signal::{idft, PeriodicSignal, Spectrum};
use crate::error::{LabError, Result};
use crate::poly::IntPolynomial;
use crate::summation::pairwise_sum;
use crate::weights::WeightTable;

const S_CHUNK: usize = 256;

fn check_periods(f: usize, g: usize, d: usize) -> Result<()> {
    if f != g || f != d {
        return Err(LabError::Shape(format!("periods differ: f={f}, g={g}, D={d}")));
    }
    Ok(())
}

/// `B_s` for every `s`; each entry is accumulated in increasing `k`.
pub fn regrouped_coefficients(f: &Spectrum, g: &Spectrum, d: &DCoefficients) -> Result<Vec<Complex64>> {
    check_periods(f.period(), g.period(), d.period())?;
    let j = f.period();
    let fc = f.coeffs();
    let gc = g.coeffs();
    let mut b = vec![Complex64::new(0.0, 0.0); j];
    b.par_chunks_mut(S_CHUNK).enumerate().for_each(|(chunk, out)| {
        let s0 = chunk * S_CHUNK;
        for (k, &fk) in fc.iter().enumerate() {
            if fk == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (i, slot) in out.iter_mut().enumerate() {
                let s = s0 + i;
                let l = (s + j - k) % j;
                *slot += fk * gc[l] * d.by_k_s(k, s);
            }
        }
    });
    Ok(b)
}

/// `A_N(j)` for all `j` through the regrouped spectral formula.
pub fn spectral_average(f: &Spectrum, g: &Spectrum, d: &DCoefficients) -> Result<PeriodicSignal> {
    let b = regrouped_coefficients(f, g, d)?;
    Ok(idft(&Spectrum::new(b)?))
}

/// `A_N(j)` at a single `j`.
pub fn spectral_average_at(f: &Spectrum, g: &Spectrum, d: &DCoefficients, j: i64) -> Result<Complex64> {
    let b = regrouped_coefficients(f, g, d)?;
    let period = b.len() as i64;
    let jj = j.rem_euclid(period) as u128;
    Ok(b
        .iter()
        .enumerate()
        .map(|(s, &bs)| {
            let t = (s as u128 * jj % period as u128) as f64;
            let (si, c) = (std::f64::consts::TAU * t / period as f64).sin_cos();
            bs * Complex64::new(c, si)
        })
        .sum())
}

/// `(1/J) Σ_j |A_N(j)|² = Σ_s |B_s|²`.
pub fn l2_norm_sq_of_average(f: &Spectrum, g: &Spectrum, d: &DCoefficients) -> Result<f64> {
    let b = regrouped_coefficients(f, g, d)?;
    let terms: Vec<f64> = b.iter().map(|z| z.norm_sqr()).collect();
    Ok(pairwise_sum(&terms))
}

/// Orbit offsets `(P(n) mod J, Q(n) mod J, ν(n))` for the nonzero weights, in increasing `n`.
pub(crate) fn orbit_terms(
    table: &WeightTable,
    p: &IntPolynomial,
    q: &IntPolynomial,
    n: u64,
    period: u64,
) -> Result<Vec<(usize, usize, f64)>> {
    table.check_range(n)?;
    Ok((1..=n)
        .filter_map(|m| {
            let w = table.get(m);
            (w != 0).then(|| {
                (
                    p.eval_mod_unchecked(m, period) as usize,
                    q.eval_mod_unchecked(m, period) as usize,
                    w as f64,
                )
            })
        })
        .collect())
}

fn direct_at(terms: &[(usize, usize, f64)], f: &[Complex64], g: &[Complex64], j: usize, n: u64) -> Complex64 {
    let period = f.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for &(pn, qn, w) in terms {
        acc += f[(j + pn) % period] * g[(j + qn) % period] * w;
    }
    acc / n as f64
}

/// `A_N(j)` for all `j` by summing over `n` directly.
pub fn direct_average(
    table: &WeightTable,
    p: &IntPolynomial,
    q: &IntPolynomial,
    f: &PeriodicSignal,
    g: &PeriodicSignal,
    n: u64,
) -> Result<PeriodicSignal> {
    check_periods(f.period(), g.period(), f.period())?;
    let period = f.period();
    let terms = orbit_terms(table, p, q, n, period as u64)?;
    let values: Vec<Complex64> = (0..period)
        .into_par_iter()
        .map(|j| direct_at(&terms, f.values(), g.values(), j, n))
        .collect();
    PeriodicSignal::new(values)
}

pub fn direct_average_at(
    table: &WeightTable,
    p: &IntPolynomial,
    q: &IntPolynomial,
    f: &PeriodicSignal,
    g: &PeriodicSignal,
    n: u64,
    j: i64,
) -> Result<Complex64> {
    check_periods(f.period(), g.period(), f.period())?;
    let period = f.period();
    let terms = orbit_terms(table, p, q, n, period as u64)?;
    let j = j.rem_euclid(period as i64) as usize;
    Ok(direct_at(&terms, f.values(), g.values(), j, n))
}

/// `(1/J) Σ_j |A(j)|²` of an already evaluated average.
pub fn mean_square(average: &PeriodicSignal) -> f64 {
    let terms: Vec<f64> = average.values().iter().map(|z| z.norm_sqr()).collect();
    pairwise_sum(&terms) / average.period() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct L4Row {
    pub n: u64,
    /// `‖A_N‖₂` on `Z_J` with the normalised measure.
    pub l2_norm: f64,
    /// `‖f‖₄ ‖g‖₄`.
    pub l4_product: f64,
    pub ratio: f64,
}

/// Ratio `‖A_N‖₂ / (‖f‖₄ ‖g‖₄)` for each `N`, with `‖A_N‖₂` taken from the
/// spectral side. No bound is asserted; the rows show the decay in `N`.
pub fn l4_bound_report(
    f: &PeriodicSignal,
    g: &PeriodicSignal,
    table: &WeightTable,
    p: &IntPolynomial,
    q: &IntPolynomial,
    ns: &[u64],
) -> Result<Vec<L4Row>> {
    if ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(LabError::Domain("N list must be strictly increasing".into()));
    }
    check_periods(f.period(), g.period(), f.period())?;
    let fs = f.dft();
    let gs = g.dft();
    let l4_product = f.norm(4.0) * g.norm(4.0);
    ns.iter()
        .map(|&n| {
            let d = d_coefficients(table, p, q, n, f.period() as u64)?;
            let l2_norm = l2_norm_sq_of_average(&fs, &gs, &d)?.max(0.0).sqrt();
            let ratio = if l4_product > 0.0 { l2_norm / l4_product } else { 0.0 };
            Ok(L4Row { n, l2_norm, l4_product, ratio })
        })
        .collect()
}
