//! Exact monotone convolution of finitely supported measures.

use crate::measure::AtomicMeasure;
use crate::roots::bisect;
use crate::{Error, Result};
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

/// Atoms of `δ_b ▷ ν`: the solutions of `G_ν(x) = 1/b`, one between each pair
/// of consecutive atoms of `ν` and one outside on the side of `b`.
pub fn point_convolve(b: f64, nu: &AtomicMeasure) -> Result<AtomicMeasure> {
    if !b.is_finite() {
        return Err(Error::InvalidArgument("shift must be finite".into()));
    }
    if nu.is_empty() {
        return Err(Error::InvalidMeasure("empty measure".into()));
    }
    if b == 0.0 {
        return Ok(nu.clone());
    }
    let at = nu.atoms();
    let m = at.len();
    let mass = nu.mass();
    let inv_b = 1.0 / b;
    let f = |x: f64| at.iter().map(|&(a, w)| w / (x - a)).sum::<f64>() - inv_b;
    let mut roots = Vec::with_capacity(m);
    if b < 0.0 {
        let lo = at[0].0 - 2.0 * b.abs() * mass - 1e-300;
        roots.push(bisect(f, lo, at[0].0, 1.0));
    }
    for k in 1..m {
        roots.push(bisect(f, at[k - 1].0, at[k].0, 1.0));
    }
    if b > 0.0 {
        let hi = at[m - 1].0 + 2.0 * b * mass;
        roots.push(bisect(f, at[m - 1].0, hi, 1.0));
    }
    let weights = interlacing_weights(b, &nu.positions(), &roots);
    AtomicMeasure::new(roots.into_iter().zip(weights).collect())
}

/// `μ_i = Π_k (b_i - a_k) / (b Π_{k≠i} (b_i - b_k))`, through logarithms
/// once the products get long enough to overflow.
fn interlacing_weights(b: f64, a: &[f64], roots: &[f64]) -> Vec<f64> {
    let m = a.len();
    roots
        .iter()
        .enumerate()
        .map(|(i, &bi)| {
            if m <= 20 {
                let num: f64 = a.iter().map(|&ak| bi - ak).product();
                let den: f64 = roots.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, &bk)| bi - bk).product();
                num / (b * den)
            } else {
                let mut log = 0.0;
                let mut neg = b < 0.0;
                for &ak in a {
                    let d = bi - ak;
                    log += d.abs().ln();
                    neg ^= d < 0.0;
                }
                for (k, &bk) in roots.iter().enumerate() {
                    if k != i {
                        let d = bi - bk;
                        log -= d.abs().ln();
                        neg ^= d < 0.0;
                    }
                }
                log -= b.abs().ln();
                let v = log.exp();
                if neg {
                    -v
                } else {
                    v
                }
            }
        })
        .collect()
}

/// `μ ▷ ν = Σ_i θ_i (δ_{x_i} ▷ ν)`; the result has exactly `m n` atoms.
pub fn monotone_convolve_atomic(mu: &AtomicMeasure, nu: &AtomicMeasure) -> Result<AtomicMeasure> {
    let mut atoms = Vec::with_capacity(mu.len() * nu.len());
    for &(x, th) in mu.atoms() {
        let part = point_convolve(x, nu)?;
        atoms.extend(part.atoms().iter().map(|&(y, w)| (y, th * w)));
    }
    let expected = atoms.len();
    let out = AtomicMeasure::new(atoms)?;
    if out.len() != expected {
        return Err(Error::AtomCollision { expected, found: out.len() });
    }
    Ok(out)
}

/// `ν ▷ ν ▷ ... ▷ ν` with `n` factors.
pub fn monotone_power(nu: &AtomicMeasure, n: usize) -> Result<AtomicMeasure> {
    if n == 0 {
        return Ok(AtomicMeasure::dirac(0.0));
    }
    let mut acc = nu.clone();
    for _ in 1..n {
        acc = monotone_convolve_atomic(nu, &acc)?;
    }
    Ok(acc)
}

/// Direction of the interlacing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterlacingPattern {
    /// `a_1 < b_1 < a_2 < ... < a_m < b_m` (shift `b > 0`).
    RightShift,
    /// `b_1 < a_1 < b_2 < ... < b_m < a_m` (shift `b < 0`).
    LeftShift,
    /// Shift zero: the atoms coincide.
    Identity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InterlacingReport {
    pub valid: bool,
    pub pattern: InterlacingPattern,
    pub first_violation: Option<usize>,
}

/// Check that the atoms of `δ_b ▷ ν` interlace those of `ν`.
pub fn interlacing_check(nu_atoms: &[f64], result_atoms: &[f64], b: f64) -> InterlacingReport {
    let pattern = if b > 0.0 {
        InterlacingPattern::RightShift
    } else if b < 0.0 {
        InterlacingPattern::LeftShift
    } else {
        InterlacingPattern::Identity
    };
    if nu_atoms.len() != result_atoms.len() {
        return InterlacingReport { valid: false, pattern, first_violation: Some(nu_atoms.len().min(result_atoms.len())) };
    }
    let m = nu_atoms.len();
    for i in 0..m {
        let (a, r) = (nu_atoms[i], result_atoms[i]);
        let ok = match pattern {
            InterlacingPattern::RightShift => a < r && (i + 1 == m || r < nu_atoms[i + 1]),
            InterlacingPattern::LeftShift => r < a && (i == 0 || nu_atoms[i - 1] < r),
            InterlacingPattern::Identity => r == a,
        };
        if !ok {
            return InterlacingReport { valid: false, pattern, first_violation: Some(i) };
        }
    }
    InterlacingReport { valid: true, pattern, first_violation: None }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn two_point() -> AtomicMeasure {
        AtomicMeasure::probability(vec![(-1.0, 0.5), (1.0, 0.5)]).unwrap()
    }

    #[test]
    fn dirac_is_translation() {
        let r = point_convolve(2.5, &AtomicMeasure::dirac(0.0)).unwrap();
        assert_eq!(r.atoms(), &[(2.5, 1.0)]);
    }

    #[test]
    fn shift_two_point() {
        // roots of x^2 - x - 1
        let r = point_convolve(1.0, &two_point()).unwrap();
        let s5 = 5f64.sqrt();
        let expect = [((1.0 - s5) / 2.0, (s5 - 1.0) / (2.0 * s5)), ((1.0 + s5) / 2.0, (s5 + 1.0) / (2.0 * s5))];
        for (got, want) in r.atoms().iter().zip(expect) {
            assert!((got.0 - want.0).abs() < 1e-14 && (got.1 - want.1).abs() < 1e-14);
        }
        let rep = interlacing_check(&[-1.0, 1.0], &r.positions(), 1.0);
        assert!(rep.valid);
        assert_eq!(rep.pattern, InterlacingPattern::RightShift);
    }

    #[test]
    fn counts_multiply() {
        let mu = AtomicMeasure::probability(vec![(-2.0, 0.2), (0.5, 0.3), (3.0, 0.5)]).unwrap();
        let r = monotone_convolve_atomic(&mu, &two_point()).unwrap();
        assert_eq!(r.len(), 6);
        assert!((r.mass() - 1.0).abs() < 1e-12);
        assert_eq!(monotone_power(&two_point(), 3).unwrap().len(), 8);
    }

    #[test]
    fn violation_reported() {
        let rep = interlacing_check(&[0.0, 1.0], &[0.5, 0.7], 1.0);
        assert_eq!(rep.first_violation, Some(1));
        let rep = interlacing_check(&[0.0, 1.0], &[-0.5, 0.5], -1.0);
        assert!(rep.valid);
    }

    #[test]
    fn log_weights_for_many_atoms() {
        let atoms: Vec<(f64, f64)> = (0..30).map(|k| (k as f64 - 15.0, 1.0 / 30.0)).collect();
        let nu = AtomicMeasure::probability(atoms).unwrap();
        let r = point_convolve(-0.7, &nu).unwrap();
        assert_eq!(r.len(), 30);
        assert!((r.mass() - 1.0).abs() < 1e-10);
        assert!(r.atoms().iter().all(|a| a.1 > 0.0));
    }
}
