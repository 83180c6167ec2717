//! SplitMix64 as a counter-based generator.
//!
//! Output `i` (zero-based) of a stream seeded with `s` is
//! `mix(s + (i + 1) * 0x9E3779B97F4A7C15)` with wrapping arithmetic, where
//! `mix` is the SplitMix64 finaliser. This is exactly the sequence produced by
//! the usual stateful SplitMix64 started from state `s`, so any language can
//! reproduce the signals used in reports. Seed 0 yields
//! `0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F, ...`.
//!
//! Signals derive a per-stream seed as output number `stream` of the base
//! seed, then read the signal entries from that stream.

use num_complex::Complex64;

pub const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Output number `index` of the SplitMix64 stream seeded with `seed`.
#[inline]
pub fn splitmix64_at(seed: u64, index: u64) -> u64 {
    mix64(seed.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// Stateful view over [`splitmix64_at`].
#[derive(Debug, Clone)]
pub struct CounterRng {
    seed: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        Self { seed, counter: 0 }
    }

    /// Independent stream number `stream` derived from this generator's seed.
    pub fn stream(seed: u64, stream: u64) -> Self {
        Self::new(splitmix64_at(seed, stream))
    }

    pub fn next_u64(&mut self) -> u64 {
        let out = splitmix64_at(self.seed, self.counter);
        self.counter += 1;
        out
    }

    /// Uniform in `[0, 1)` from the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[0, bound)`; `bound` must be positive. Uses the widening
    /// multiply, which has bias below `bound / 2^64`.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        ((self.next_u64() as u128 * bound as u128) >> 64) as u64
    }
}

/// `±1` signal of length `len`: entry `j` is `-1` when the top bit of output `j`
/// of stream `stream` is set.
pub fn sign_values(seed: u64, stream: u64, len: usize) -> Vec<Complex64> {
    let mut rng = CounterRng::stream(seed, stream);
    (0..len)
        .map(|_| {
            if rng.next_u64() >> 63 == 1 {
                Complex64::new(-1.0, 0.0)
            } else {
                Complex64::new(1.0, 0.0)
            }
        })
        .collect()
}

/// Complex signal with real and imaginary parts uniform in `[-1, 1)`; entry `j`
/// uses outputs `2j` (real) and `2j + 1` (imaginary).
pub fn uniform_values(seed: u64, stream: u64, len: usize) -> Vec<Complex64> {
    let mut rng = CounterRng::stream(seed, stream);
    (0..len)
        .map(|_| {
            let re = 2.0 * rng.next_f64() - 1.0;
            let im = 2.0 * rng.next_f64() - 1.0;
            Complex64::new(re, im)
        })
        .collect()
}
