//! Seeded cross-validation of the spectral route against direct summation.

use num_complex::Complex64;
use serde::Serialize;

use super::average::{direct_average, l2_norm_sq_of_average, mean_square, spectral_average};
use super::kernel::{d_coefficients, d_entry_direct};
use super::signal::PeriodicSignal;
use crate::error::Result;
use crate::poly::IntPolynomial;
use crate::rng::{uniform_values, CounterRng};
use crate::weights::WeightTable;
use crate::{relative_error, MIXED_PATH_TOL, ROUND_TRIP_TOL};

/// Number of `(k, l)` entries of `D` re-evaluated by naive summation when the
/// matrix has more than this many entries.
pub const KERNEL_SAMPLES: usize = 64;

#[derive(Debug, Clone, Serialize)]
pub struct SpectralCheckConfig {
    pub period: u64,
    pub n: u64,
    pub p: IntPolynomial,
    pub q: IntPolynomial,
    pub seed: u64,
    pub trials: u32,
    /// Corrupts one entry of `D` before the comparison.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub inject_fault: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralCheckReport {
    /// `max_j |spectral − direct| / max(1, |direct|)` over all trials.
    pub max_conv_error: f64,
    /// Relative gap between the two `ℓ²` routes.
    pub max_square5_error: f64,
    /// Relative Parseval defect over every generated signal.
    pub parseval_error: f64,
    /// `max |idft(dft(f)) − f| / max(1, ‖f‖_∞)`.
    pub round_trip_error: f64,
    /// Largest gap between `D` from the kernel route and naive summation.
    pub max_kernel_error: f64,
    pub kernel_entries_checked: usize,
    pub max_abs_d: f64,
    pub passed: bool,
}

pub fn run_spectral_check(table: &WeightTable, config: &SpectralCheckConfig) -> Result<SpectralCheckReport> {
    let period = config.period as usize;
    let mut d = d_coefficients(table, &config.p, &config.q, config.n, config.period)?;
    if config.inject_fault {
        d.perturb(1, 0, Complex64::new(0.5, 0.0));
    }

    let pairs: Vec<(u64, u64)> = if period * period <= KERNEL_SAMPLES {
        (0..config.period)
            .flat_map(|k| (0..config.period).map(move |l| (k, l)))
            .collect()
    } else {
        let mut rng = CounterRng::stream(config.seed, u64::MAX);
        let mut v = vec![(0, 0)];
        v.extend((1..KERNEL_SAMPLES).map(|_| (rng.next_below(config.period), rng.next_below(config.period))));
        v
    };
    let mut max_kernel_error = 0.0f64;
    for &(k, l) in &pairs {
        let direct = d_entry_direct(table, &config.p, &config.q, config.n, config.period, k, l)?;
        max_kernel_error = max_kernel_error.max(relative_error(d.get(k as usize, l as usize), direct));
    }

    let mut max_conv_error = 0.0f64;
    let mut max_square5_error = 0.0f64;
    let mut parseval_error = 0.0f64;
    let mut round_trip_error = 0.0f64;
    for t in 0..config.trials as u64 {
        let f = PeriodicSignal::new(uniform_values(config.seed, 2 * t, period))?;
        let g = PeriodicSignal::new(uniform_values(config.seed, 2 * t + 1, period))?;
        let fs = f.dft();
        let gs = g.dft();
        for (sig, spec) in [(&f, &fs), (&g, &gs)] {
            let lhs = sig.norm(2.0).powi(2);
            parseval_error = parseval_error.max((lhs - spec.energy()).abs() / lhs.max(1.0));
            let back = spec.idft();
            let scale = sig.sup_norm().max(1.0);
            for (a, b) in back.values().iter().zip(sig.values()) {
                round_trip_error = round_trip_error.max((a - b).norm() / scale);
            }
        }
        let direct = direct_average(table, &config.p, &config.q, &f, &g, config.n)?;
        let spectral = spectral_average(&fs, &gs, &d)?;
        for (s, r) in spectral.values().iter().zip(direct.values()) {
            max_conv_error = max_conv_error.max(relative_error(*s, *r));
        }
        let ms_direct = mean_square(&direct);
        let ms_spectral = l2_norm_sq_of_average(&fs, &gs, &d)?;
        max_square5_error = max_square5_error.max((ms_spectral - ms_direct).abs() / ms_direct.max(1.0));
    }

    let passed = max_conv_error <= MIXED_PATH_TOL
        && max_square5_error <= MIXED_PATH_TOL
        && max_kernel_error <= MIXED_PATH_TOL
        && parseval_error <= ROUND_TRIP_TOL
        && round_trip_error <= ROUND_TRIP_TOL;
    Ok(SpectralCheckReport {
        max_conv_error,
        max_square5_error,
        parseval_error,
        round_trip_error,
        max_kernel_error,
        kernel_entries_checked: pairs.len(),
        max_abs_d: d.max_abs(),
        passed,
    })
}
