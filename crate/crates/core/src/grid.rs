//! Abscissa generators for sampled measures.

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

/// `n` equally spaced points on `[lo, hi]`.
pub fn uniform(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return alloc::vec![0.5 * (lo + hi)];
    }
    let d = (hi - lo) / (n - 1) as f64;
    (0..n).map(|k| if k + 1 == n { hi } else { lo + d * k as f64 }).collect()
}

/// Midpoint Chebyshev nodes on `(lo, hi)`, increasing. These cluster at the
/// ends, which suits densities with inverse square-root edges.
pub fn chebyshev(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let c = 0.5 * (lo + hi);
    let r = 0.5 * (hi - lo);
    (0..n)
        .map(|k| c - r * (PI * (k as f64 + 0.5) / n as f64).cos())
        .collect()
}

/// `n` logarithmically spaced points on `[lo, hi]`, `0 < lo < hi`.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return alloc::vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    let d = (b - a) / (n - 1) as f64;
    (0..n).map(|k| if k + 1 == n { hi } else { (a + d * k as f64).exp() }).collect()
}

/// Geometric schedule of `n` values from `hi` down to `lo`.
pub fn geometric_desc(hi: f64, lo: f64, n: usize) -> Vec<f64> {
    let mut v = log_spaced(lo, hi, n);
    v.reverse();
    v
}
