//! Fixed-order summation helpers.
//!
//! Every reduction here has an order that depends only on the input length, so
//! results are bit-identical however the inputs were produced.

use num_complex::Complex64;

const LEAF: usize = 16;

/// Pairwise (cascade) summation. Error grows as O(log n) ulps.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

pub fn pairwise_sum_complex(values: &[Complex64]) -> Complex64 {
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum_complex(&values[..mid]) + pairwise_sum_complex(&values[mid..])
}

/// Pairwise sum of `f(i)` for `i` in `0..len` without materialising the terms.
pub fn pairwise_sum_by<F>(len: usize, f: &F) -> Complex64
where
    F: Fn(usize) -> Complex64,
{
    fn go<F: Fn(usize) -> Complex64>(lo: usize, hi: usize, f: &F) -> Complex64 {
        if hi - lo <= LEAF {
            return (lo..hi).map(f).sum();
        }
        let mid = lo + (hi - lo) / 2;
        go(lo, mid, f) + go(mid, hi, f)
    }
    go(0, len, f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_naive_on_integers() {
        let v: Vec<f64> = (1..=1000).map(|x| x as f64).collect();
        assert_eq!(pairwise_sum(&v), 500_500.0);
        let c: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, -x)).collect();
        assert_eq!(pairwise_sum_complex(&c), Complex64::new(500_500.0, -500_500.0));
        assert_eq!(pairwise_sum_by(c.len(), &|i| c[i]), pairwise_sum_complex(&c));
    }

    #[test]
    fn pairwise_beats_naive_on_small_increments() {
        let v = vec![0.1; 1 << 20];
        let exact = 0.1 * (1u64 << 20) as f64;
        let naive: f64 = v.iter().sum();
        assert!((pairwise_sum(&v) - exact).abs() <= (naive - exact).abs());
        assert!((pairwise_sum(&v) - exact).abs() < 1e-9);
    }
}
