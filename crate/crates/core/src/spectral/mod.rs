//! Finite Fourier analysis on `Z_J = Z/JZ`.

pub mod average;
pub mod check;
pub mod kernel;
pub mod signal;
pub mod transform;

pub use average::{
    direct_average, direct_average_at, l2_norm_sq_of_average, l4_bound_report, mean_square,
    regrouped_coefficients, spectral_average, spectral_average_at, L4Row,
};
pub use check::{run_spectral_check, SpectralCheckConfig, SpectralCheckReport};
pub use kernel::{
    build_kernels, d_coefficients, d_entry_direct, diagonal_kernel, l_kernel, off_diagonal_kernel,
    DCoefficients, Kernel1D, Kernel2D, KernelSet,
};
pub use signal::{dft, idft, PeriodicSignal, Spectrum};
