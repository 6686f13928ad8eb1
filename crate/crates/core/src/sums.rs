//! Deterministic reductions.
//!
//! Every sum that may run under rayon goes through fixed-shape pairwise
//! reduction: the result is a pure function of the term order, never of the
//! thread count or work-stealing schedule.

use num_complex::Complex64;
use rayon::prelude::*;

const LEAF: usize = 32;

pub fn pairwise_sum(v: &[Complex64]) -> Complex64 {
    if v.len() <= LEAF {
        let mut acc = Complex64::new(0.0, 0.0);
        for z in v {
            acc += z;
        }
        return acc;
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

pub fn pairwise_sum_f64(v: &[f64]) -> f64 {
    if v.len() <= LEAF {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum_f64(&v[..mid]) + pairwise_sum_f64(&v[mid..])
}

/// Sum `f(i)` for `i` in `0..count` in parallel with a deterministic result.
pub fn par_sum_indexed<F>(count: usize, f: F) -> Complex64
where
    F: Fn(usize) -> Complex64 + Sync + Send,
{
    let terms: Vec<Complex64> = (0..count).into_par_iter().map(f).collect();
    pairwise_sum(&terms)
}

/// Sum `f(n)` for `n` in `lo..=hi` by fixed 8192-wide chunks; chunks are
/// evaluated in parallel, each chunk sequentially, then combined pairwise.
pub fn par_sum_range_f64<F>(lo: u64, hi: u64, f: F) -> f64
where
    F: Fn(u64) -> f64 + Sync,
{
    if hi < lo {
        return 0.0;
    }
    const CHUNK: u64 = 8192;
    let starts: Vec<u64> = (lo..=hi).step_by(CHUNK as usize).collect();
    let partials: Vec<f64> = starts
        .into_par_iter()
        .map(|s| {
            let stop = hi.min(s + CHUNK - 1);
            let mut acc = 0.0;
            for n in s..=stop {
                acc += f(n);
            }
            acc
        })
        .collect();
    pairwise_sum_f64(&partials)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_sequential() {
        let v: Vec<f64> = (1..=10_000).map(|n| 1.0 / n as f64).collect();
        let seq: f64 = v.iter().sum();
        assert!((pairwise_sum_f64(&v) - seq).abs() < 1e-12);
    }

    #[test]
    fn range_sum_is_deterministic_and_correct() {
        let f = |n: u64| 1.0 / (n * n) as f64;
        let a = par_sum_range_f64(1, 100_000, f);
        let b = par_sum_range_f64(1, 100_000, f);
        assert_eq!(a.to_bits(), b.to_bits());
        assert!((a - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-4);
    }

    #[test]
    fn empty_range() {
        assert_eq!(par_sum_range_f64(5, 4, |_| 1.0), 0.0);
    }
}
