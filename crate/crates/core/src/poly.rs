//! Integer polynomials with exact modular evaluation.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{LabError, Result};

pub const MAX_DEGREE: usize = 8;

/// `c_0 + c_1 n + … + c_d n^d` with `1 ≤ d ≤ 8` and `c_d ≠ 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<i64>,
}

impl IntPolynomial {
    /// Coefficients constant term first. Trailing zeros are trimmed before the
    /// degree is checked.
    pub fn new(coeffs: &[i64]) -> Result<Self> {
        let mut coeffs = coeffs.to_vec();
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        if coeffs.len() < 2 {
            return Err(LabError::Domain("polynomial must be non-constant".into()));
        }
        if coeffs.len() - 1 > MAX_DEGREE {
            return Err(LabError::Domain(format!(
                "degree {} exceeds the maximum of {MAX_DEGREE}",
                coeffs.len() - 1
            )));
        }
        Ok(Self { coeffs })
    }

    /// `P(n) = n`.
    pub fn identity() -> Self {
        Self { coeffs: vec![0, 1] }
    }

    /// `P(n) = -n`.
    pub fn negation() -> Self {
        Self { coeffs: vec![0, -1] }
    }

    /// `P(n) = n^k`, `k ≥ 1`.
    pub fn monomial(k: usize) -> Result<Self> {
        let mut coeffs = vec![0; k + 1];
        coeffs[k] = 1;
        Self::new(&coeffs)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn leading_coefficient(&self) -> i64 {
        self.coeffs[self.degree()]
    }

    /// `P(n) mod m` in `[0, m)` by Horner's rule with 128-bit products; exact
    /// for all `n, m < 2^64`.
    pub fn eval_mod(&self, n: u64, m: u64) -> Result<u64> {
        if m == 0 {
            return Err(LabError::Domain("modulus must be positive".into()));
        }
        Ok(self.eval_mod_unchecked(n, m))
    }

    /// [`eval_mod`](Self::eval_mod) without the modulus check; `m` must be positive.
    #[inline]
    pub fn eval_mod_unchecked(&self, n: u64, m: u64) -> u64 {
        let m128 = m as u128;
        let x = (n % m) as u128;
        self.coeffs.iter().rev().fold(0u128, |acc, &c| {
            let c = (c as i128).rem_euclid(m as i128) as u128;
            (acc * x + c) % m128
        }) as u64
    }

    /// Exact `P(n)`, or `None` on 128-bit overflow.
    pub fn eval_i128(&self, n: i64) -> Option<i128> {
        let x = n as i128;
        self.coeffs
            .iter()
            .rev()
            .try_fold(0i128, |acc, &c| acc.checked_mul(x)?.checked_add(c as i128))
    }

    /// `P(n) ≥ 0` for `n = 0..=probe_limit` and a positive leading coefficient.
    pub fn maps_naturals_to_naturals(&self, probe_limit: u64) -> bool {
        if self.leading_coefficient() <= 0 {
            return false;
        }
        (0..=probe_limit).all(|n| match i64::try_from(n).ok().and_then(|n| self.eval_i128(n)) {
            Some(v) => v >= 0,
            // Beyond 128 bits the leading term dominates.
            None => true,
        })
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for IntPolynomial {
    type Err = LabError;

    /// Parses `"c0,c1,...,cd"`, constant term first.
    fn from_str(s: &str) -> Result<Self> {
        let coeffs = s
            .split(',')
            .map(|part| {
                part.trim()
                    .parse::<i64>()
                    .map_err(|e| LabError::Parse(format!("bad coefficient `{}`: {e}", part.trim())))
            })
            .collect::<Result<Vec<i64>>>()?;
        Self::new(&coeffs)
    }
}

impl Serialize for IntPolynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}
