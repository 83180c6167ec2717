//! Numerical laboratory for Möbius- and Liouville-weighted polynomial ergodic
//! averages.
//!
//! The crate is organised bottom-up:
//!
//! * [`weights`] sieves the arithmetic weights and checks their classical identities.
//! * [`poly`] holds exact integer polynomials with overflow-free modular evaluation.
//! * [`exp_sums`] evaluates weighted polynomial exponential sums and their decay.
//! * [`spectral`] is the finite Fourier engine on `Z/JZ`: transforms, the
//!   coefficient matrix `D`, the kernels and the two routes to the averages.
//! * [`dynamics`] evaluates averages along orbits of shifts and rational rotations.
//! * [`maximal`] computes lacunary ladders, band maximal functions and the
//!   oscillation and weak-type statistics.
//!
//! All transforms use the normalisation `F(f)(k) = (1/J) Σ_n f(n) e^{-2πikn/J}`,
//! so that `f(j) = Σ_k F(f)(k) e^{2πikj/J}` and Parseval reads
//! `(1/J) Σ_j |f(j)|² = Σ_k |F(f)(k)|²`.

pub mod dynamics;
pub mod error;
pub mod exp_sums;
pub mod maximal;
pub mod poly;
pub mod rng;
pub mod spectral;
pub mod summation;
pub mod weights;

pub use error::{LabError, Result};
pub use num_complex::Complex64;
pub use poly::IntPolynomial;
pub use spectral::{PeriodicSignal, Spectrum};
pub use weights::{WeightKind, WeightTable};

/// Tolerance for unitary round trips (transform followed by its inverse, Parseval).
pub const ROUND_TRIP_TOL: f64 = 1e-12;
/// Tolerance for comparisons between two different computation routes.
pub const MIXED_PATH_TOL: f64 = 1e-9;

/// `|a - b| / max(1, |b|)`, the relative error used by every dual-path check.
pub fn relative_error(value: Complex64, reference: Complex64) -> f64 {
    (value - reference).norm() / reference.norm().max(1.0)
}
