use num_complex::Complex64;

use super::transform::{transform, Direction, Strategy};
use crate::error::{LabError, Result};
use crate::summation::pairwise_sum;

/// A `J`-periodic complex sequence. Indices are always taken mod `J`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicSignal {
    values: Vec<Complex64>,
}

impl PeriodicSignal {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(LabError::Shape("period must be at least 1".into()));
        }
        Ok(Self { values })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn constant(period: usize, value: Complex64) -> Result<Self> {
        Self::new(vec![value; period])
    }

    /// `1` at `at mod J`, `0` elsewhere.
    pub fn delta(period: usize, at: i64) -> Result<Self> {
        let mut s = Self::constant(period, Complex64::new(0.0, 0.0))?;
        let idx = at.rem_euclid(period as i64) as usize;
        s.values[idx] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn period(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    #[inline]
    pub fn get(&self, j: usize) -> Complex64 {
        self.values[j % self.values.len()]
    }

    #[inline]
    pub fn at(&self, j: i64) -> Complex64 {
        self.values[j.rem_euclid(self.values.len() as i64) as usize]
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self { values: self.values.iter().map(|&v| v * c).collect() }
    }

    /// `((1/J) Σ_j |f(j)|^p)^{1/p}` with the normalised counting measure.
    pub fn norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.sup_norm();
        }
        let terms: Vec<f64> = self.values.iter().map(|v| v.norm().powf(p)).collect();
        (pairwise_sum(&terms) / self.period() as f64).powf(1.0 / p)
    }

    /// `(Σ_j |f(j)|^p)^{1/p}` with the plain counting measure.
    pub fn counting_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.sup_norm();
        }
        let terms: Vec<f64> = self.values.iter().map(|v| v.norm().powf(p)).collect();
        pairwise_sum(&terms).powf(1.0 / p)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn dft(&self) -> Spectrum {
        dft(self)
    }
}

/// Fourier coefficients `c_k = (1/J) Σ_n f(n) e^{-2πikn/J}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(LabError::Shape("period must be at least 1".into()));
        }
        Ok(Self { coeffs })
    }

    pub fn period(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient at `k mod J`.
    #[inline]
    pub fn at(&self, k: i64) -> Complex64 {
        self.coeffs[k.rem_euclid(self.coeffs.len() as i64) as usize]
    }

    /// `Σ_k |c_k|²`, equal to `‖f‖₂²` by Parseval.
    pub fn energy(&self) -> f64 {
        let terms: Vec<f64> = self.coeffs.iter().map(|c| c.norm_sqr()).collect();
        pairwise_sum(&terms)
    }

    pub fn idft(&self) -> PeriodicSignal {
        idft(self)
    }
}

pub fn dft(signal: &PeriodicSignal) -> Spectrum {
    let mut coeffs = signal.values.clone();
    transform(&mut coeffs, Direction::Forward, Strategy::Auto);
    let scale = 1.0 / coeffs.len() as f64;
    coeffs.iter_mut().for_each(|c| *c *= scale);
    Spectrum { coeffs }
}

/// `f(j) = Σ_k c_k e^{2πikj/J}`.
pub fn idft(spectrum: &Spectrum) -> PeriodicSignal {
    let mut values = spectrum.coeffs.clone();
    transform(&mut values, Direction::Inverse, Strategy::Auto);
    PeriodicSignal { values }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::uniform_values;
    use proptest::prelude::*;

    #[test]
    fn constant_and_delta() {
        for j in [1usize, 7, 64, 97] {
            let one = PeriodicSignal::constant(j, Complex64::new(1.0, 0.0)).unwrap();
            let c = one.dft();
            assert!((c.coeffs()[0] - 1.0).norm() < 1e-15);
            assert!(c.coeffs()[1..].iter().all(|z| z.norm() < 1e-14));

            let d = PeriodicSignal::delta(j, 0).unwrap().dft();
            assert!(d.coeffs().iter().all(|z| (z - 1.0 / j as f64).norm() < 1e-15));
        }
    }

    #[test]
    fn delta_wraps() {
        let d = PeriodicSignal::delta(5, -1).unwrap();
        assert_eq!(d.get(4), Complex64::new(1.0, 0.0));
        assert_eq!(d.at(-6), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn norms() {
        let s = PeriodicSignal::from_real(&[1.0, -1.0, 1.0, -1.0]).unwrap();
        assert!((s.norm(4.0) - 1.0).abs() < 1e-15);
        assert!((s.counting_norm(2.0) - 2.0).abs() < 1e-15);
        assert_eq!(s.norm(f64::INFINITY), 1.0);
        assert!(PeriodicSignal::new(vec![]).is_err());
    }

    #[test]
    fn round_trip_1024() {
        let f = PeriodicSignal::new(uniform_values(1, 0, 1024)).unwrap();
        let back = f.dft().idft();
        for (a, b) in back.values().iter().zip(f.values()) {
            assert!((a - b).norm() <= 1e-12);
        }
    }

    proptest! {
        #[test]
        fn parseval_and_round_trip(seed in any::<u64>(), j in 1usize..300) {
            let f = PeriodicSignal::new(uniform_values(seed, 0, j)).unwrap();
            let spec = f.dft();
            let lhs = f.norm(2.0).powi(2);
            prop_assert!((lhs - spec.energy()).abs() <= 1e-12 * lhs.max(1.0));
            let back = spec.idft();
            let scale = f.sup_norm().max(1.0);
            for (a, b) in back.values().iter().zip(f.values()) {
                prop_assert!((a - b).norm() <= 1e-12 * scale);
            }
        }
    }
}
