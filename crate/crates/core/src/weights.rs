//! Möbius and Liouville weights.
//!
//! Tables are built once by a sieve and are read-only afterwards. Index `n`
//! runs over `1..=limit`; `n = 0` is never a valid argument.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::summation::pairwise_sum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightKind {
    Mobius,
    Liouville,
}

impl fmt::Display for WeightKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightKind::Mobius => f.write_str("mobius"),
            WeightKind::Liouville => f.write_str("liouville"),
        }
    }
}

impl FromStr for WeightKind {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mobius" | "möbius" | "mu" => Ok(WeightKind::Mobius),
            "liouville" | "lambda" => Ok(WeightKind::Liouville),
            other => Err(LabError::Parse(format!(
                "unknown weight `{other}` (expected mobius or liouville)"
            ))),
        }
    }
}

/// Sieve tuning.
#[derive(Debug, Clone)]
pub struct SieveOptions {
    /// Limits up to this value use one smallest-prime-factor pass.
    pub single_block_limit: u64,
    /// Segment length for the segmented sieve above `single_block_limit`.
    pub segment_len: usize,
    /// Memory budget expressed as the largest permitted limit (one byte per entry).
    pub max_limit: u64,
}

impl Default for SieveOptions {
    fn default() -> Self {
        Self {
            single_block_limit: 10_000_000,
            segment_len: 1 << 18,
            max_limit: 1 << 30,
        }
    }
}

/// Values `ν(n) ∈ {-1, 0, 1}` for `n = 1..=limit`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightTable {
    kind: Option<WeightKind>,
    // values[0] is a zero placeholder so that values[n] = ν(n).
    values: Vec<i8>,
}

impl WeightTable {
    pub fn sieve(kind: WeightKind, limit: u64) -> Result<Self> {
        Self::sieve_with(kind, limit, &SieveOptions::default())
    }

    pub fn sieve_with(kind: WeightKind, limit: u64, options: &SieveOptions) -> Result<Self> {
        if limit == 0 {
            return Err(LabError::Capacity("sieve limit must be at least 1".into()));
        }
        if limit > options.max_limit {
            return Err(LabError::Capacity(format!(
                "sieve limit {limit} exceeds the memory budget of {} entries",
                options.max_limit
            )));
        }
        let values = if limit <= options.single_block_limit {
            linear_sieve(kind, limit as usize)
        } else {
            segmented_sieve(kind, limit, options.segment_len.max(1))
        };
        Ok(Self { kind: Some(kind), values })
    }

    /// Arbitrary weights for `n = 1..=values.len()`; used for control experiments.
    pub fn from_values(values: &[i8]) -> Result<Self> {
        if values.is_empty() {
            return Err(LabError::Capacity("weight table must be nonempty".into()));
        }
        if let Some(bad) = values.iter().find(|v| !(-1..=1).contains(*v)) {
            return Err(LabError::Domain(format!("weight {bad} is not in {{-1, 0, 1}}")));
        }
        let mut stored = Vec::with_capacity(values.len() + 1);
        stored.push(0);
        stored.extend_from_slice(values);
        Ok(Self { kind: None, values: stored })
    }

    pub fn constant(value: i8, limit: u64) -> Result<Self> {
        Self::from_values(&vec![value; limit as usize])
    }

    pub fn zeros(limit: u64) -> Result<Self> {
        Self::constant(0, limit)
    }

    /// `None` for tables built with [`WeightTable::from_values`].
    pub fn kind(&self) -> Option<WeightKind> {
        self.kind
    }

    pub fn limit(&self) -> u64 {
        (self.values.len() - 1) as u64
    }

    /// `ν(n)`, panicking when `n` is out of range.
    #[inline]
    pub fn get(&self, n: u64) -> i8 {
        assert!(n >= 1, "weights are indexed from 1");
        self.values[n as usize]
    }

    pub fn value(&self, n: u64) -> Result<i8> {
        self.check_range(n)?;
        Ok(self.values[n as usize])
    }

    /// Values for `n = 1..=limit`, so `as_slice()[n - 1] = ν(n)`.
    pub fn as_slice(&self) -> &[i8] {
        &self.values[1..]
    }

    pub fn check_range(&self, n: u64) -> Result<()> {
        if n == 0 || n > self.limit() {
            Err(LabError::Bounds { index: n, limit: self.limit() })
        } else {
            Ok(())
        }
    }

    /// `Σ_{n ≤ N} ν(n)` exactly.
    pub fn partial_sum(&self, n: u64) -> Result<i64> {
        self.check_range(n)?;
        Ok(self.values[1..=n as usize].iter().map(|&v| v as i64).sum())
    }

    /// Running sums `S(1), …, S(limit)`.
    pub fn running_sums(&self) -> Vec<i64> {
        self.as_slice()
            .iter()
            .scan(0i64, |acc, &v| {
                *acc += v as i64;
                Some(*acc)
            })
            .collect()
    }

    fn require_kind(&self, kind: WeightKind, role: &str) -> Result<()> {
        match self.kind {
            Some(k) if k == kind => Ok(()),
            _ => Err(LabError::Domain(format!("{role} must be a sieved {kind} table"))),
        }
    }
}

fn linear_sieve(kind: WeightKind, limit: usize) -> Vec<i8> {
    let mut values = vec![0i8; limit + 1];
    values[1] = 1;
    let mut spf = vec![0u32; limit + 1];
    let mut primes: Vec<u32> = Vec::new();
    for i in 2..=limit {
        if spf[i] == 0 {
            spf[i] = i as u32;
            primes.push(i as u32);
            values[i] = -1;
        }
        let spf_i = spf[i];
        for &p in &primes {
            let m = i * p as usize;
            if p > spf_i || m > limit {
                break;
            }
            spf[m] = p;
            values[m] = match kind {
                WeightKind::Liouville => -values[i],
                WeightKind::Mobius if p == spf_i => 0,
                WeightKind::Mobius => -values[i],
            };
        }
    }
    values
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

fn small_primes(bound: u64) -> Vec<u64> {
    let bound = bound as usize;
    let mut composite = vec![false; bound + 1];
    let mut primes = Vec::new();
    for i in 2..=bound {
        if !composite[i] {
            primes.push(i as u64);
            let mut m = i * i;
            while m <= bound {
                composite[m] = true;
                m += i;
            }
        }
    }
    primes
}

fn segmented_sieve(kind: WeightKind, limit: u64, segment_len: usize) -> Vec<i8> {
    let primes = small_primes(isqrt(limit));
    let mut values = vec![0i8; limit as usize + 1];
    values[1..]
        .par_chunks_mut(segment_len)
        .enumerate()
        .for_each(|(i, chunk)| {
            let lo = 1 + (i * segment_len) as u64;
            sieve_segment(kind, lo, chunk, &primes);
        });
    values
}

/// Fills `out[i] = ν(lo + i)` by dividing out every prime up to the square root.
fn sieve_segment(kind: WeightKind, lo: u64, out: &mut [i8], primes: &[u64]) {
    let hi = lo + out.len() as u64;
    let mut rest: Vec<u64> = (lo..hi).collect();
    let mut mobius = vec![1i8; out.len()];
    let mut odd_omega = vec![false; out.len()];
    for &p in primes {
        if p * p > hi - 1 {
            break;
        }
        let first = lo.div_ceil(p) * p;
        let mut m = first;
        while m < hi {
            let i = (m - lo) as usize;
            let mut e = 0u32;
            while rest[i] % p == 0 {
                rest[i] /= p;
                e += 1;
            }
            mobius[i] = if e >= 2 { 0 } else { -mobius[i] };
            odd_omega[i] ^= e % 2 == 1;
            m += p;
        }
    }
    for i in 0..out.len() {
        if rest[i] > 1 {
            mobius[i] = -mobius[i];
            odd_omega[i] ^= true;
        }
        out[i] = match kind {
            WeightKind::Mobius => mobius[i],
            WeightKind::Liouville => {
                if odd_omega[i] {
                    -1
                } else {
                    1
                }
            }
        };
    }
}

/// Outcome of checking `λ(n) = Σ_{d² | n} μ(n / d²)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub holds: bool,
    pub checked_up_to: u64,
    pub first_counterexample: Option<u64>,
}

/// Verifies `λ(n) = Σ_{d: d² | n} μ(n/d²)` for all `n ≤ limit`.
///
/// The right side is accumulated by scattering `μ(m)` onto `m·d²`, which costs
/// about `ζ(2)·limit` additions.
pub fn check_lambda_mu_identity(
    mu: &WeightTable,
    lambda: &WeightTable,
    limit: u64,
) -> Result<IdentityCheck> {
    mu.require_kind(WeightKind::Mobius, "first table")?;
    lambda.require_kind(WeightKind::Liouville, "second table")?;
    mu.check_range(limit)?;
    lambda.check_range(limit)?;
    let len = limit as usize;
    let mut rhs = vec![0i32; len + 1];
    let mut d = 1usize;
    while d * d <= len {
        let sq = d * d;
        for m in 1..=len / sq {
            rhs[m * sq] += mu.values[m] as i32;
        }
        d += 1;
    }
    let first = (1..=len).find(|&n| rhs[n] != lambda.values[n] as i32);
    Ok(IdentityCheck {
        holds: first.is_none(),
        checked_up_to: limit,
        first_counterexample: first.map(|n| n as u64),
    })
}

/// `Σ_{n ≤ N} μ(n) / n^s` for real `s > 1`.
pub fn zeta_reciprocal_partial(mu: &WeightTable, s: f64, limit: u64) -> Result<f64> {
    mu.require_kind(WeightKind::Mobius, "table")?;
    if !(s > 1.0) || !s.is_finite() {
        return Err(LabError::Domain(format!("s = {s} must be a finite real above 1")));
    }
    mu.check_range(limit)?;
    let terms: Vec<f64> = (1..=limit)
        .map(|n| mu.values[n as usize] as f64 * (n as f64).powf(-s))
        .collect();
    Ok(pairwise_sum(&terms))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthRow {
    pub n: u64,
    pub sum: i64,
    /// `|S(N)| / N`.
    pub density: f64,
    /// `|S(N)| / N^exponent`.
    pub scaled: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthProfile {
    pub exponent: f64,
    pub rows: Vec<GrowthRow>,
    pub max_scaled: f64,
}

/// Partial-sum profile: `|S(N)|/N` and `|S(N)|/N^exponent` at each requested `N`.
///
/// With `exponent` slightly above `1/2` the scaled column is the quantity whose
/// boundedness is equivalent to the Riemann Hypothesis; it is reported only.
pub fn growth_profile(table: &WeightTable, ns: &[u64], exponent: f64) -> Result<GrowthProfile> {
    if let Some(&bad) = ns.iter().find(|&&n| n == 0 || n > table.limit()) {
        return Err(LabError::Bounds { index: bad, limit: table.limit() });
    }
    let sums = table.running_sums();
    let rows: Vec<GrowthRow> = ns
        .iter()
        .map(|&n| {
            let sum = sums[n as usize - 1];
            GrowthRow {
                n,
                sum,
                density: sum.unsigned_abs() as f64 / n as f64,
                scaled: sum.unsigned_abs() as f64 / (n as f64).powf(exponent),
            }
        })
        .collect();
    let max_scaled = rows.iter().map(|r| r.scaled).fold(0.0, f64::max);
    Ok(GrowthProfile { exponent, rows, max_scaled })
}
