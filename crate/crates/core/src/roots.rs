//! Bracketed root finding on the real line.

/// Root of `f` in `(lo, hi)` where `f` has sign `s_lo` near `lo` and the
/// opposite sign near `hi`. Only signs of `f` at interior midpoints are
/// used, so the ends may be poles.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, s_lo: f64) -> f64 {
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid);
        if v == 0.0 {
            return mid;
        }
        if v.is_nan() {
            break;
        }
        if (v > 0.0) == (s_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Walk from `start` in direction `dir` with doubling steps until the sign
/// of `f` differs from `s_ref`. Returns the first such point.
pub fn expand<F: FnMut(f64) -> f64>(mut f: F, start: f64, dir: f64, s_ref: f64, step0: f64) -> Option<f64> {
    let mut step = step0.max(1e-12);
    for _ in 0..1100 {
        let x = start + dir * step;
        if !x.is_finite() {
            return None;
        }
        let v = f(x);
        if v.is_nan() {
            return None;
        }
        if v == 0.0 || (v > 0.0) != (s_ref > 0.0) {
            return Some(x);
        }
        step *= 2.0;
    }
    None
}
