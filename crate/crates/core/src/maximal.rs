//! Lacunary ladders, band maximal functions and the oscillation and weak-type
//! statistics for the shift on `Z_J`.
//!
//! Throughout, `A_N(j) = (1/N) Σ_{n ≤ N} ν(n) φ(j + P(n)) ψ(j + Q(n))`. The
//! running sum `Σ_{n ≤ N}` is accumulated in increasing `n`, so for `±1`
//! observables every `A_N(j)` is an exact integer divided by `N`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{DynamicalSystem, Observable};
use crate::error::{LabError, Result};
use crate::poly::IntPolynomial;
use crate::spectral::PeriodicSignal;
use crate::summation::pairwise_sum;
use crate::weights::WeightTable;

pub const DEFAULT_RHO: f64 = 2.0;

/// `I_ρ = {⌊ρ^n⌋ : n ≥ 0}` up to a limit, with band endpoints drawn from it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LacunaryLadder {
    rho: f64,
    limit: u64,
    members: Vec<u64>,
    bands: Vec<u64>,
}

impl LacunaryLadder {
    /// Members up to `limit`; the band endpoints default to all members in order.
    pub fn new(rho: f64, limit: u64) -> Result<Self> {
        if !(rho > 1.0) || !rho.is_finite() {
            return Err(LabError::Config(format!("rho must exceed 1 (got {rho})")));
        }
        if limit == 0 {
            return Err(LabError::Domain("ladder limit must be at least 1".into()));
        }
        let mut members: Vec<u64> = Vec::new();
        let mut exponent = 0i32;
        loop {
            let v = rho.powi(exponent).floor();
            if v > limit as f64 {
                break;
            }
            let v = v as u64;
            if members.last() != Some(&v) {
                members.push(v);
            }
            exponent += 1;
        }
        Ok(Self { rho, limit, bands: members.clone(), members })
    }

    /// Replaces the band endpoints; they must be strictly increasing ladder members.
    pub fn with_bands(mut self, endpoints: &[u64]) -> Result<Self> {
        if endpoints.len() < 2 {
            return Err(LabError::Domain("need at least two band endpoints".into()));
        }
        if endpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(LabError::Domain("band endpoints must be strictly increasing".into()));
        }
        if let Some(bad) = endpoints.iter().find(|e| self.members.binary_search(e).is_err()) {
            return Err(LabError::Domain(format!("{bad} is not a member of the ladder")));
        }
        self.bands = endpoints.to_vec();
        Ok(self)
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn bands(&self) -> &[u64] {
        &self.bands
    }

    /// Number of complete bands `[N_k, N_{k+1}]`.
    pub fn band_count(&self) -> usize {
        self.bands.len().saturating_sub(1)
    }

    /// `(N_k, N_{k+1})` for zero-based band index `k`.
    pub fn band(&self, k: usize) -> Result<(u64, u64)> {
        if k + 1 >= self.bands.len() {
            return Err(LabError::Domain(format!(
                "band {k} does not exist ({} bands)",
                self.band_count()
            )));
        }
        Ok((self.bands[k], self.bands[k + 1]))
    }

    /// Members in `[lo, hi]`.
    fn members_between(&self, lo: u64, hi: u64) -> &[u64] {
        let a = self.members.partition_point(|&m| m < lo);
        let b = self.members.partition_point(|&m| m <= hi);
        &self.members[a..b]
    }
}

/// Offsets `(P(n) mod J, Q(n) mod J)` and weights for `n = 1..=N`.
struct Orbit {
    offsets: Vec<(usize, usize)>,
    weights: Vec<f64>,
}

impl Orbit {
    fn new(table: &WeightTable, p: &IntPolynomial, q: &IntPolynomial, n: u64, period: usize) -> Result<Self> {
        table.check_range(n)?;
        let m = period as u64;
        Ok(Self {
            offsets: (1..=n)
                .map(|k| (p.eval_mod_unchecked(k, m) as usize, q.eval_mod_unchecked(k, m) as usize))
                .collect(),
            weights: (1..=n).map(|k| table.get(k) as f64).collect(),
        })
    }

    /// `A_N(j)` at each checkpoint `N` (sorted, `≤` orbit length) from one running sum.
    fn averages_at(&self, phi: &[Complex64], psi: &[Complex64], j: usize, checkpoints: &[u64]) -> Vec<Complex64> {
        let period = phi.len();
        let mut out = Vec::with_capacity(checkpoints.len());
        let mut acc = Complex64::new(0.0, 0.0);
        let mut done = 0usize;
        for &target in checkpoints {
            while done < target as usize {
                let w = self.weights[done];
                if w != 0.0 {
                    let (pn, qn) = self.offsets[done];
                    acc += phi[(j + pn) % period] * psi[(j + qn) % period] * w;
                }
                done += 1;
            }
            out.push(acc / target as f64);
        }
        out
    }
}

fn check_signals(phi: &PeriodicSignal, psi: &PeriodicSignal) -> Result<()> {
    if phi.period() != psi.period() {
        return Err(LabError::Shape(format!(
            "periods differ: {} and {}",
            phi.period(),
            psi.period()
        )));
    }
    Ok(())
}

/// `m_k(j)` for every band and every `j`, as `result[k][j]`.
fn band_table(
    phi: &PeriodicSignal,
    psi: &PeriodicSignal,
    p: &IntPolynomial,
    q: &IntPolynomial,
    table: &WeightTable,
    ladder: &LacunaryLadder,
    bands: std::ops::Range<usize>,
) -> Result<Vec<Vec<f64>>> {
    check_signals(phi, psi)?;
    if bands.is_empty() {
        return Ok(Vec::new());
    }
    let (_, top) = ladder.band(bands.end - 1)?;
    let (bottom, _) = ladder.band(bands.start)?;
    let orbit = Orbit::new(table, p, q, top, phi.period())?;
    let checkpoints = ladder.members_between(bottom, top).to_vec();
    let spans: Vec<(usize, usize)> = bands
        .clone()
        .map(|k| {
            let (lo, hi) = ladder.band(k).expect("checked above");
            let a = checkpoints.partition_point(|&m| m < lo);
            let b = checkpoints.partition_point(|&m| m <= hi);
            (a, b)
        })
        .collect();
    let per_j: Vec<Vec<f64>> = (0..phi.period())
        .into_par_iter()
        .map(|j| {
            let a = orbit.averages_at(phi.values(), psi.values(), j, &checkpoints);
            spans
                .iter()
                .map(|&(lo, hi)| a[lo..hi].iter().map(|v| (v - a[lo]).norm()).fold(0.0, f64::max))
                .collect()
        })
        .collect();
    Ok((0..spans.len()).map(|k| per_j.iter().map(|row| row[k]).collect()).collect())
}

/// `j ↦ max_{N ∈ I_ρ, N_k ≤ N ≤ N_{k+1}} |A_N(j) − A_{N_k}(j)|` for zero-based band `k`.
pub fn band_maximal(
    phi: &PeriodicSignal,
    psi: &PeriodicSignal,
    p: &IntPolynomial,
    q: &IntPolynomial,
    table: &WeightTable,
    ladder: &LacunaryLadder,
    k: usize,
) -> Result<Vec<f64>> {
    Ok(band_table(phi, psi, p, q, table, ladder, k..k + 1)?.remove(0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OscillationReport {
    pub rho: f64,
    pub endpoints: Vec<u64>,
    /// `‖m_{N_k, N_{k+1}}‖₂` on `Z_J` with the normalised measure.
    pub band_norms: Vec<f64>,
    /// `Σ_{k ≤ K} ‖m_k‖₂` for `K = 1, 2, …`.
    pub cumulative: Vec<f64>,
    /// `√K ‖φ‖₄ ‖ψ‖₄`.
    pub comparison: Vec<f64>,
    /// `cumulative / comparison`.
    pub ratios: Vec<f64>,
    pub l4_product: f64,
}

/// Oscillation sums over the first `bands` bands of the ladder.
pub fn oscillation_sum(
    phi: &PeriodicSignal,
    psi: &PeriodicSignal,
    p: &IntPolynomial,
    q: &IntPolynomial,
    table: &WeightTable,
    ladder: &LacunaryLadder,
    bands: usize,
) -> Result<OscillationReport> {
    if bands == 0 || bands > ladder.band_count() {
        return Err(LabError::Domain(format!(
            "requested {bands} bands but the ladder provides {}",
            ladder.band_count()
        )));
    }
    let per_band = band_table(phi, psi, p, q, table, ladder, 0..bands)?;
    let band_norms: Vec<f64> = per_band
        .iter()
        .map(|m| {
            let sq: Vec<f64> = m.iter().map(|v| v * v).collect();
            (pairwise_sum(&sq) / m.len() as f64).sqrt()
        })
        .collect();
    let cumulative: Vec<f64> = band_norms
        .iter()
        .scan(0.0, |acc, &v| {
            *acc += v;
            Some(*acc)
        })
        .collect();
    let l4_product = phi.norm(4.0) * psi.norm(4.0);
    let comparison: Vec<f64> = (1..=bands).map(|k| (k as f64).sqrt() * l4_product).collect();
    let ratios = cumulative
        .iter()
        .zip(&comparison)
        .map(|(c, d)| if *d > 0.0 { c / d } else { 0.0 })
        .collect();
    Ok(OscillationReport {
        rho: ladder.rho(),
        endpoints: ladder.bands()[..=bands].to_vec(),
        band_norms,
        cumulative,
        comparison,
        ratios,
        l4_product,
    })
}

/// `j ↦ max_{1 ≤ N ≤ N_max} |A_N(j)|` over every `N`, not only ladder members.
pub fn global_maximal(
    phi: &PeriodicSignal,
    psi: &PeriodicSignal,
    p: &IntPolynomial,
    q: &IntPolynomial,
    table: &WeightTable,
    n_max: u64,
) -> Result<Vec<f64>> {
    check_signals(phi, psi)?;
    let orbit = Orbit::new(table, p, q, n_max, phi.period())?;
    let period = phi.period();
    let (f, g) = (phi.values(), psi.values());
    Ok((0..period)
        .into_par_iter()
        .map(|j| {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut best = 0.0f64;
            for (i, (&(pn, qn), &w)) in orbit.offsets.iter().zip(&orbit.weights).enumerate() {
                if w != 0.0 {
                    acc += f[(j + pn) % period] * g[(j + qn) % period] * w;
                }
                best = best.max((acc / (i + 1) as f64).norm());
            }
            best
        })
        .collect())
}

/// 64 logarithmically spaced levels from `1e-4` to `upper`.
pub fn default_lambda_grid(upper: f64) -> Vec<f64> {
    const POINTS: usize = 64;
    const LOWER: f64 = 1e-4;
    if !(upper > LOWER) {
        return vec![upper.max(f64::MIN_POSITIVE)];
    }
    let (a, b) = (LOWER.ln(), upper.ln());
    (0..POINTS)
        .map(|i| (a + (b - a) * i as f64 / (POINTS - 1) as f64).exp())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeakTypeReport {
    /// `max_λ λ · #{j : M(j) > λ}` over the grid.
    pub statistic: f64,
    pub argmax_lambda: f64,
    /// `‖φ‖_p ‖ψ‖_q` with the counting measure.
    pub norm_product: f64,
    pub ratio: f64,
    pub p: f64,
    pub q: f64,
}

fn conjugate(p: f64, q: f64) -> bool {
    let inv = |x: f64| if x.is_infinite() { 0.0 } else { 1.0 / x };
    p >= 1.0 && q >= 1.0 && (inv(p) + inv(q) - 1.0).abs() <= 1e-12
}

/// Weak-type statistic of the truncated global maximal function.
#[allow(clippy::too_many_arguments)]
pub fn weak_type_statistic(
    phi: &PeriodicSignal,
    psi: &PeriodicSignal,
    p: &IntPolynomial,
    q: &IntPolynomial,
    table: &WeightTable,
    n_max: u64,
    lambdas: &[f64],
    exponents: (f64, f64),
) -> Result<WeakTypeReport> {
    let (pe, qe) = exponents;
    if !conjugate(pe, qe) {
        return Err(LabError::Config(format!("exponents {pe} and {qe} are not conjugate")));
    }
    if lambdas.is_empty() || lambdas.iter().any(|&l| !(l > 0.0)) {
        return Err(LabError::Config("lambda grid must be nonempty and positive".into()));
    }
    let maximal = global_maximal(phi, psi, p, q, table, n_max)?;
    let mut statistic = 0.0;
    let mut argmax_lambda = lambdas[0];
    for &l in lambdas {
        let count = maximal.iter().filter(|&&v| v > l).count();
        let value = l * count as f64;
        if value > statistic {
            statistic = value;
            argmax_lambda = l;
        }
    }
    let norm_product = phi.counting_norm(pe) * psi.counting_norm(qe);
    let ratio = if norm_product > 0.0 { statistic / norm_product } else { 0.0 };
    Ok(WeakTypeReport { statistic, argmax_lambda, norm_product, ratio, p: pe, q: qe })
}

/// `φ_x(n) = f(T^{P(n)} x)` for `|n| ≤ 2N̄`, zero otherwise, as a `J`-periodic
/// signal (`n` stored at `n mod J`). Requires `J > 4N̄` so the window does not wrap.
pub fn transfer_window(
    system: &DynamicalSystem,
    f: &Observable,
    poly: &IntPolynomial,
    x: u64,
    n_bar: u64,
    period: usize,
) -> Result<PeriodicSignal> {
    f.validate(system)?;
    system.validate_state(x)?;
    if (period as u64) <= 4 * n_bar {
        return Err(LabError::Domain(format!("period {period} must exceed 4·N̄ = {}", 4 * n_bar)));
    }
    let m = system.modulus();
    let mut values = vec![Complex64::new(0.0, 0.0); period];
    let reach = 2 * n_bar as i64;
    for n in -reach..=reach {
        let residue = n.rem_euclid(m as i64) as u64;
        let point = system.orbit_point(x, poly, residue, 1);
        values[n.rem_euclid(period as i64) as usize] = f.eval(point, m);
    }
    PeriodicSignal::new(values)
}
