//! Signed mass kernels on `Z_J` and `Z_J × Z_J` and the coefficient matrix `D`.
//!
//! Kernel masses are stored as exact integer counts `c` over a common
//! denominator `N`, so the mass at a point is `c / N`.
//!
//! Kernel transforms are transforms of measures: `K̂(k) = Σ_x K(x) χ_k(x)` with
//! `χ_k(x) = e^{2πikx/J}`, no `1/J` factor and the positive sign. With this
//! convention `D_{N,k,s-k} = L̂_N(k, s)` holds literally.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;

use super::transform::{transform_2d, Direction, Strategy};
use crate::error::{LabError, Result};
use crate::poly::IntPolynomial;
use crate::summation::pairwise_sum_by;
use crate::weights::WeightTable;

/// Largest period for which a dense `J × J` matrix is allocated (1 GiB).
pub const MAX_DENSE_PERIOD: usize = 8192;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Kernel1D {
    period: u64,
    n: u64,
    counts: BTreeMap<u64, i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Kernel2D {
    period: u64,
    n: u64,
    counts: BTreeMap<(u64, u64), i64>,
}

impl Kernel1D {
    pub fn period(&self) -> u64 {
        self.period
    }

    pub fn mass(&self, x: u64) -> f64 {
        self.counts.get(&(x % self.period)).map_or(0.0, |&c| c as f64 / self.n as f64)
    }

    /// Nonzero `(point, count)` pairs in increasing point order.
    pub fn counts(&self) -> impl Iterator<Item = (u64, i64)> + '_ {
        self.counts.iter().map(|(&x, &c)| (x, c))
    }

    pub fn total_mass(&self) -> f64 {
        self.counts.values().sum::<i64>() as f64 / self.n as f64
    }

    pub fn total_abs_mass(&self) -> f64 {
        self.counts.values().map(|c| c.unsigned_abs()).sum::<u64>() as f64 / self.n as f64
    }

    pub fn transform_at(&self, k: u64) -> Complex64 {
        let j = self.period;
        let pts: Vec<(u64, i64)> = self.counts().collect();
        pairwise_sum_by(pts.len(), &|i| {
            let (x, c) = pts[i];
            let t = ((k % j) as u128 * x as u128 % j as u128) as f64;
            let (s, co) = (TAU * t / j as f64).sin_cos();
            Complex64::new(co, s) * c as f64
        }) / self.n as f64
    }

    /// `K ⊙ K`: the same masses placed on the diagonal `(x, x)`.
    pub fn off_diagonal(&self) -> Kernel2D {
        Kernel2D {
            period: self.period,
            n: self.n,
            counts: self.counts.iter().map(|(&x, &c)| ((x, x), c)).collect(),
        }
    }
}

impl Kernel2D {
    pub fn period(&self) -> u64 {
        self.period
    }

    pub fn mass(&self, a: u64, b: u64) -> f64 {
        self.counts
            .get(&(a % self.period, b % self.period))
            .map_or(0.0, |&c| c as f64 / self.n as f64)
    }

    pub fn counts(&self) -> impl Iterator<Item = ((u64, u64), i64)> + '_ {
        self.counts.iter().map(|(&x, &c)| (x, c))
    }

    pub fn total_mass(&self) -> f64 {
        self.counts.values().sum::<i64>() as f64 / self.n as f64
    }

    pub fn total_abs_mass(&self) -> f64 {
        self.counts.values().map(|c| c.unsigned_abs()).sum::<u64>() as f64 / self.n as f64
    }

    /// `K̂(k, s) = Σ_{a,b} K(a, b) χ_k(a) χ_s(b)` by direct summation over the support.
    pub fn transform_at(&self, k: u64, s: u64) -> Complex64 {
        let j = self.period as u128;
        let pts: Vec<((u64, u64), i64)> = self.counts().collect();
        pairwise_sum_by(pts.len(), &|i| {
            let ((a, b), c) = pts[i];
            let t = ((k as u128 % j) * a as u128 + (s as u128 % j) * b as u128) % j;
            let (si, co) = (TAU * t as f64 / j as f64).sin_cos();
            Complex64::new(co, si) * c as f64
        }) / self.n as f64
    }

    /// Full transform as a row-major `J × J` matrix indexed by `(k, s)`.
    pub fn transform_dense(&self) -> Result<Vec<Complex64>> {
        let j = self.period as usize;
        if j > MAX_DENSE_PERIOD {
            return Err(LabError::Capacity(format!(
                "period {j} exceeds the dense transform limit {MAX_DENSE_PERIOD}"
            )));
        }
        let mut grid = vec![Complex64::new(0.0, 0.0); j * j];
        let scale = 1.0 / self.n as f64;
        for (&(a, b), &c) in &self.counts {
            grid[a as usize * j + b as usize] = Complex64::new(c as f64 * scale, 0.0);
        }
        transform_2d(&mut grid, j, Direction::Inverse, Strategy::Auto);
        Ok(grid)
    }
}

fn validate(table: &WeightTable, n: u64, period: u64) -> Result<()> {
    if period == 0 {
        return Err(LabError::Domain("period J must be at least 1".into()));
    }
    table.check_range(n)
}

/// `K_{N,P} = (1/N) Σ_{n ≤ N} ν(n) δ_{P(n) mod J}`.
pub fn diagonal_kernel(table: &WeightTable, p: &IntPolynomial, n: u64, period: u64) -> Result<Kernel1D> {
    validate(table, n, period)?;
    let mut counts = BTreeMap::new();
    for m in 1..=n {
        let w = table.get(m);
        if w != 0 {
            *counts.entry(p.eval_mod_unchecked(m, period)).or_insert(0) += w as i64;
        }
    }
    counts.retain(|_, c| *c != 0);
    Ok(Kernel1D { period, n, counts })
}

fn pair_kernel<F>(table: &WeightTable, n: u64, period: u64, place: F) -> Result<Kernel2D>
where
    F: Fn(u64) -> (u64, u64),
{
    validate(table, n, period)?;
    let mut counts = BTreeMap::new();
    for m in 1..=n {
        let w = table.get(m);
        if w != 0 {
            *counts.entry(place(m)).or_insert(0) += w as i64;
        }
    }
    counts.retain(|_, c| *c != 0);
    Ok(Kernel2D { period, n, counts })
}

/// `K_{N,P} ⊙ K_{N,Q} = (1/N) Σ ν(n) δ_{P(n)} ⊗ δ_{Q(n)}`.
pub fn off_diagonal_kernel(
    table: &WeightTable,
    p: &IntPolynomial,
    q: &IntPolynomial,
    n: u64,
    period: u64,
) -> Result<Kernel2D> {
    pair_kernel(table, n, period, |m| {
        (p.eval_mod_unchecked(m, period), q.eval_mod_unchecked(m, period))
    })
}

/// `L_N = (1/N) Σ ν(n) δ_{P(n) - Q(n)} ⊗ δ_{Q(n)}`.
pub fn l_kernel(
    table: &WeightTable,
    p: &IntPolynomial,
    q: &IntPolynomial,
    n: u64,
    period: u64,
) -> Result<Kernel2D> {
    pair_kernel(table, n, period, |m| {
        let pm = p.eval_mod_unchecked(m, period);
        let qm = q.eval_mod_unchecked(m, period);
        ((pm + period - qm) % period, qm)
    })
}

#[derive(Debug, Clone)]
pub struct KernelSet {
    pub k_p: Kernel1D,
    pub k_q: Kernel1D,
    pub l_n: Kernel2D,
}

pub fn build_kernels(
    table: &WeightTable,
    p: &IntPolynomial,
    q: &IntPolynomial,
    n: u64,
    period: u64,
) -> Result<KernelSet> {
    Ok(KernelSet {
        k_p: diagonal_kernel(table, p, n, period)?,
        k_q: diagonal_kernel(table, q, n, period)?,
        l_n: l_kernel(table, p, q, n, period)?,
    })
}

/// `D_{N,k,l} = (1/N) Σ_{n ≤ N} ν(n) χ_k(P(n)) χ_l(Q(n))` for all `k, l`.
///
/// Stored as `L̂_N(k, s)` so that `D_{N,k,l}` sits at `(k, k + l mod J)` and the
/// slice for a fixed `s = k + l` is a column.
#[derive(Debug, Clone)]
pub struct DCoefficients {
    period: usize,
    n: u64,
    by_k_s: Vec<Complex64>,
}

impl DCoefficients {
    pub fn period(&self) -> usize {
        self.period
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// `D_{N,k,l}` with indices taken mod `J`.
    #[inline]
    pub fn get(&self, k: usize, l: usize) -> Complex64 {
        let j = self.period;
        let (k, l) = (k % j, l % j);
        self.by_k_s[k * j + (k + l) % j]
    }

    /// `D_{N,k,s-k} = L̂_N(k, s)`.
    #[inline]
    pub fn by_k_s(&self, k: usize, s: usize) -> Complex64 {
        self.by_k_s[(k % self.period) * self.period + s % self.period]
    }

    pub fn max_abs(&self) -> f64 {
        self.by_k_s.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Overwrites one entry. Exists so that dual-path checks can be shown to
    /// catch a corrupted matrix.
    #[doc(hidden)]
    pub fn perturb(&mut self, k: usize, l: usize, delta: Complex64) {
        let j = self.period;
        let (k, l) = (k % j, l % j);
        self.by_k_s[k * j + (k + l) % j] += delta;
    }
}

/// All `J²` coefficients through the kernel route: accumulate `L_N` in `O(N)`,
/// then one two-dimensional transform.
pub fn d_coefficients(
    table: &WeightTable,
    p: &IntPolynomial,
    q: &IntPolynomial,
    n: u64,
    period: u64,
) -> Result<DCoefficients> {
    let kernel = l_kernel(table, p, q, n, period)?;
    Ok(DCoefficients {
        period: period as usize,
        n,
        by_k_s: kernel.transform_dense()?,
    })
}

/// One coefficient `D_{N,k,l}` by naive summation over `n`, with each phase
/// `k·P(n) + l·Q(n) mod J` reduced exactly before the exponential.
pub fn d_entry_direct(
    table: &WeightTable,
    p: &IntPolynomial,
    q: &IntPolynomial,
    n: u64,
    period: u64,
    k: u64,
    l: u64,
) -> Result<Complex64> {
    validate(table, n, period)?;
    let j = period as u128;
    let terms: Vec<Complex64> = (1..=n)
        .into_par_iter()
        .map(|m| {
            let w = table.get(m) as f64;
            if w == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let pm = p.eval_mod_unchecked(m, period) as u128;
            let qm = q.eval_mod_unchecked(m, period) as u128;
            let t = ((k as u128 % j) * pm + (l as u128 % j) * qm) % j;
            let (s, c) = (TAU * t as f64 / j as f64).sin_cos();
            Complex64::new(c, s) * w
        })
        .collect();
    Ok(pairwise_sum_by(terms.len(), &|i| terms[i]) / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::WeightKind;

    fn mobius(limit: u64) -> WeightTable {
        WeightTable::sieve(WeightKind::Mobius, limit).unwrap()
    }

    #[test]
    fn single_term_kernels() {
        let mu = mobius(10);
        let p = IntPolynomial::new(&[3, 1]).unwrap();
        let k = diagonal_kernel(&mu, &p, 1, 7).unwrap();
        assert_eq!(k.counts().collect::<Vec<_>>(), vec![(4, 1)]);
        assert_eq!(k.mass(4), 1.0);
        assert_eq!(k.mass(11), 1.0);
    }

    #[test]
    fn masses_sum_to_weighted_mean() {
        let mu = mobius(1000);
        let p = IntPolynomial::monomial(2).unwrap();
        let q = IntPolynomial::negation();
        let set = build_kernels(&mu, &p, &q, 1000, 17).unwrap();
        let mean = mu.partial_sum(1000).unwrap() as f64 / 1000.0;
        assert!((set.l_n.total_mass() - mean).abs() < 1e-15);
        assert!((set.k_p.total_mass() - mean).abs() < 1e-15);
        assert!(set.l_n.total_abs_mass() <= 1.0);
        let od = set.k_p.off_diagonal();
        assert!((od.total_mass() - mean).abs() < 1e-15);
    }

    #[test]
    fn l_kernel_placement() {
        let w = WeightTable::constant(1, 3).unwrap();
        let p = IntPolynomial::monomial(2).unwrap();
        let q = IntPolynomial::identity();
        let l = l_kernel(&w, &p, &q, 3, 5).unwrap();
        // n=1: (0,1); n=2: (2,2); n=3: (6 mod 5 = 1, 3)
        let pts: Vec<_> = l.counts().map(|(x, _)| x).collect();
        assert_eq!(pts, vec![(0, 1), (1, 3), (2, 2)]);
    }

    #[test]
    fn d_matrix_matches_direct_entries() {
        let mu = mobius(1000);
        let p = IntPolynomial::monomial(2).unwrap();
        let q = IntPolynomial::identity();
        for period in [1u64, 31, 64] {
            let d = d_coefficients(&mu, &p, &q, 1000, period).unwrap();
            let mean = mu.partial_sum(1000).unwrap() as f64 / 1000.0;
            assert!((d.get(0, 0) - mean).norm() < 1e-12);
            for (k, l) in [(0u64, 0u64), (1, 5), (17, 3), (30, 30), (63, 1)] {
                let direct = d_entry_direct(&mu, &p, &q, 1000, period, k, l).unwrap();
                let got = d.get(k as usize, l as usize);
                assert!((got - direct).norm() < 1e-12, "J={period} k={k} l={l}");
            }
            assert!(d.max_abs() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn dense_matches_sparse_transform() {
        let mu = mobius(500);
        let p = IntPolynomial::new(&[1, 1, 0, 1]).unwrap();
        let q = IntPolynomial::negation();
        let l = l_kernel(&mu, &p, &q, 500, 32).unwrap();
        let dense = l.transform_dense().unwrap();
        for k in 0..32u64 {
            for s in 0..32u64 {
                let sparse = l.transform_at(k, s);
                assert!((dense[(k * 32 + s) as usize] - sparse).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn errors() {
        let mu = mobius(10);
        let p = IntPolynomial::identity();
        assert!(matches!(diagonal_kernel(&mu, &p, 11, 4), Err(LabError::Bounds { .. })));
        assert!(matches!(diagonal_kernel(&mu, &p, 5, 0), Err(LabError::Domain(_))));
        let l = l_kernel(&mu, &p, &p, 5, 9000).unwrap();
        assert!(matches!(l.transform_dense(), Err(LabError::Capacity(_))));
    }
}
