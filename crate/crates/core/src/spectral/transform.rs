//! Unnormalised discrete Fourier transforms on `Z/JZ`.
//!
//! Lengths whose prime factors are all at most [`SMOOTH_PRIME_BOUND`] go
//! through `rustfft`; other lengths use the direct `O(J²)` sum with exact
//! integer twiddle indices `k·n mod J`. Padding is never used since it would
//! change the group.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

pub const SMOOTH_PRIME_BOUND: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Kernel `e^{-2πikn/J}`.
    Forward,
    /// Kernel `e^{+2πikn/J}`.
    Inverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Auto,
    Fft,
    Direct,
}

pub fn is_smooth(mut n: usize) -> bool {
    if n == 0 {
        return false;
    }
    for p in [2, 3, 5, 7] {
        while n % p == 0 {
            n /= p;
        }
    }
    debug_assert_eq!(SMOOTH_PRIME_BOUND, 7);
    n == 1
}

/// `e^{±2πi t/J}` for `t = 0..J`.
pub fn roots_of_unity(len: usize, direction: Direction) -> Vec<Complex64> {
    let sign = match direction {
        Direction::Forward => -1.0,
        Direction::Inverse => 1.0,
    };
    (0..len)
        .map(|t| {
            let (s, c) = (TAU * t as f64 / len as f64).sin_cos();
            Complex64::new(c, sign * s)
        })
        .collect()
}

fn resolve(strategy: Strategy, len: usize) -> Strategy {
    match strategy {
        Strategy::Auto if is_smooth(len) => Strategy::Fft,
        Strategy::Auto => Strategy::Direct,
        s => s,
    }
}

/// Transforms each consecutive chunk of length `len` in place.
pub fn transform_chunks(data: &mut [Complex64], len: usize, direction: Direction, strategy: Strategy) {
    assert!(len > 0 && data.len() % len == 0);
    match resolve(strategy, len) {
        Strategy::Fft => {
            let fft = FftPlanner::new().plan_fft(
                len,
                match direction {
                    Direction::Forward => FftDirection::Forward,
                    Direction::Inverse => FftDirection::Inverse,
                },
            );
            fft.process(data);
        }
        _ => {
            let roots = roots_of_unity(len, direction);
            let mut out = vec![Complex64::new(0.0, 0.0); len];
            for chunk in data.chunks_mut(len) {
                for (k, slot) in out.iter_mut().enumerate() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    let mut idx = 0usize;
                    for &x in chunk.iter() {
                        acc += x * roots[idx];
                        idx += k;
                        if idx >= len {
                            idx -= len;
                        }
                    }
                    *slot = acc;
                }
                chunk.copy_from_slice(&out);
            }
        }
    }
}

pub fn transform(data: &mut [Complex64], direction: Direction, strategy: Strategy) {
    let len = data.len();
    if len > 0 {
        transform_chunks(data, len, direction, strategy);
    }
}

fn transpose_square(data: &mut [Complex64], n: usize) {
    for r in 0..n {
        for c in (r + 1)..n {
            data.swap(r * n + c, c * n + r);
        }
    }
}

/// Two-dimensional transform of a row-major `n × n` array along both axes.
pub fn transform_2d(data: &mut [Complex64], n: usize, direction: Direction, strategy: Strategy) {
    assert_eq!(data.len(), n * n);
    transform_chunks(data, n, direction, strategy);
    transpose_square(data, n);
    transform_chunks(data, n, direction, strategy);
    transpose_square(data, n);
}
