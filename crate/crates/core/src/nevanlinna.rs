//! Integral representations of `H`, positivity of supports and injectivity.

use crate::invert::{stieltjes_invert, InversionOptions};
use crate::measure::{AtomicMeasure, Family, GridMeasure, Measure};
use crate::moments::moments_of;
use crate::semigroup::subordinator_condition;
use crate::transform::{atomic_partial_fractions, support_bounds, TransformEvaluator, Provenance};
use crate::{Error, Result, C64};
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

/// `H(z) = z + a + ∫ dρ(x)/(x - z)`.
#[derive(Debug, Clone)]
pub struct FiniteVarianceRep {
    /// Minus the mean.
    pub a: f64,
    pub rho: Measure,
    /// `ρ(ℝ)`, equal to the variance.
    pub rho_mass: f64,
}

impl FiniteVarianceRep {
    pub fn eval(&self, z: C64) -> Result<C64> {
        Ok(z + self.a - self.rho.cauchy(z)?)
    }
}

/// `H(z) = z + b + ∫ (1 + xz)/(x - z) dη(x)`.
#[derive(Debug, Clone)]
pub struct NevanlinnaRep {
    pub b: f64,
    pub eta: Measure,
}

impl NevanlinnaRep {
    pub fn eval(&self, z: C64) -> Result<C64> {
        let s: C64 = match &self.eta {
            Measure::Atomic(a) => a.atoms().iter().map(|&(x, w)| w * (1.0 + x * z) / (x - z)).sum(),
            _ => return Err(Error::Unsupported("evaluation of a non-atomic Nevanlinna measure".into())),
        };
        Ok(z + self.b + s)
    }
}

fn mean_and_variance(m: &Measure) -> Result<(f64, f64)> {
    match moments_of(m, 2) {
        Ok(v) => {
            let mean = v[1] / v[0];
            Ok((mean, (v[2] / v[0] - mean * mean).max(0.0)))
        }
        Err(Error::DivergentMoment(_)) => Err(Error::InfiniteVariance),
        Err(e) => Err(e),
    }
}

/// Finite-variance representation. Exact for atomic measures; otherwise
/// `ρ` is recovered by inversion on the grid of `m` (or a sampled grid).
pub fn finite_variance_rep(m: &Measure) -> Result<FiniteVarianceRep> {
    m.validate()?;
    let (mean, var) = mean_and_variance(m)?;
    let a = -mean;
    if let Measure::Atomic(at) = m {
        let (_, poles) = atomic_partial_fractions(at)?;
        let rho = AtomicMeasure::new(poles.into_iter().filter(|p| p.1 > 0.0).collect())?;
        let rho_mass = rho.mass();
        return Ok(FiniteVarianceRep { a, rho: Measure::Atomic(rho), rho_mass });
    }
    if let Some(_) = m.as_dirac() {
        return Ok(FiniteVarianceRep { a, rho: Measure::Atomic(AtomicMeasure::empty()), rho_mass: 0.0 });
    }
    if var == 0.0 {
        return Ok(FiniteVarianceRep { a, rho: Measure::Atomic(AtomicMeasure::empty()), rho_mass: 0.0 });
    }
    let h = crate::transform::reciprocal_transform(m)?;
    // normalised: reciprocal transform of ρ/var
    let h_rho = TransformEvaluator::new(
        move |z| {
            let g = z + a - h.eval(z)?;
            if g.norm() < 1e-300 {
                return Err(Error::ZeroG);
            }
            Ok(var / g)
        },
        Provenance::Composition,
    );
    let xs = rep_grid(m)?;
    let g = stieltjes_invert(&h_rho, &xs, &InversionOptions::default())?;
    let rho = GridMeasure::new(
        g.xs.clone(),
        g.density.iter().map(|d| d * var).collect(),
        g.atoms.scaled(var),
    )?;
    Ok(FiniteVarianceRep { a, rho: Measure::Grid(rho), rho_mass: var })
}

fn rep_grid(m: &Measure) -> Result<Vec<f64>> {
    match m {
        Measure::Grid(g) => Ok(g.xs.clone()),
        _ => {
            let (lo, hi) = support_bounds(m)?;
            let w = (hi - lo).max(1e-3);
            Ok(crate::grid::uniform(lo - 0.05 * w, hi + 0.05 * w, 801))
        }
    }
}

/// Nevanlinna pair of an atomic probability measure, from its partial fractions.
pub fn nevanlinna_rep(m: &AtomicMeasure) -> Result<NevanlinnaRep> {
    let (alpha, poles) = atomic_partial_fractions(m)?;
    let b = alpha + poles.iter().map(|&(x, beta)| x * beta / (1.0 + x * x)).sum::<f64>();
    let eta = AtomicMeasure::new(poles.into_iter().map(|(x, beta)| (x, beta / (1.0 + x * x))).collect())?;
    Ok(NevanlinnaRep { b, eta: Measure::Atomic(eta) })
}

/// Whether the measure behind `rep` lives on `[0, ∞)`: `η` on `[0, ∞)`,
/// no atom at `0`, `∫ 1/x dη < ∞` and `b + ∫ 1/x dη ≤ 0`.
pub fn positivity_check(rep: &NevanlinnaRep) -> bool {
    subordinator_condition(-rep.b, &rep.eta).map(|v| v.holds).unwrap_or(false)
}

/// Candidate starting points: `i 2^k` for `k = ±1, ±2, ±3, ±4, 0`, then a
/// 10×10 grid with log-spaced heights in `[0.05, 20]` and real parts in `[-10, 10]`.
pub fn default_seed_points() -> Vec<C64> {
    let mut pts: Vec<C64> = [-1, 1, -2, 2, -3, 3, -4, 4, 0].iter().map(|&k| C64::new(0.0, 2f64.powi(k))).collect();
    let ims = crate::grid::log_spaced(0.05, 20.0, 10);
    let res = crate::grid::uniform(-10.0, 10.0, 11);
    for &y in &ims {
        for &x in &res {
            pts.push(C64::new(x, y));
        }
    }
    pts
}

/// All ordered pairs of distinct default seed points.
pub fn default_collision_seeds() -> Vec<(C64, C64)> {
    let pts = default_seed_points();
    let mut out = Vec::with_capacity(pts.len() * pts.len());
    for &a in &pts {
        for &b in &pts {
            if a != b {
                out.push((a, b));
            }
        }
    }
    out
}

fn derivative(h: &TransformEvaluator, z: C64) -> Option<C64> {
    let d = 1e-6 * (1.0 + z.norm());
    let hp = h.eval(z + d).ok()?;
    let hm = h.eval(z - d).ok()?;
    let v = (hp - hm) / (2.0 * d);
    v.is_finite().then_some(v)
}

/// Damped Newton for `h(z) = target` from `z`, staying in the upper half-plane.
fn newton(h: &TransformEvaluator, target: C64, mut z: C64) -> Option<C64> {
    let mut r = h.eval(z).ok()? - target;
    for _ in 0..100 {
        if r.norm() < 1e-13 * (1.0 + target.norm()) {
            return Some(z);
        }
        let dh = derivative(h, z)?;
        if dh.norm() == 0.0 {
            return None;
        }
        let step = r / dh;
        let mut lam = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let zn = z - step * lam;
            if zn.im > 0.0 {
                if let Ok(v) = h.eval(zn) {
                    let rn = v - target;
                    if rn.is_finite() && rn.norm() < r.norm() {
                        z = zn;
                        r = rn;
                        accepted = true;
                        break;
                    }
                }
            }
            lam *= 0.5;
        }
        if !accepted || (step * lam).norm() < 1e-12 * (1.0 + z.norm()) {
            break;
        }
    }
    (r.norm() < 1e-10).then_some(z)
}

/// Search for `z1 ≠ z2` in the upper half-plane with `h(z1) = h(z2)`.
/// Among all hits the pair with the largest `Im z1 · Im z2` is returned,
/// ordered by increasing imaginary part; ties go to the earlier seed.
pub fn collision_search(h: &TransformEvaluator, seeds: &[(C64, C64)]) -> Option<(C64, C64)> {
    let mut best: Option<(C64, C64, f64)> = None;
    let mut targets: Vec<(C64, Option<C64>)> = Vec::new();
    for &(z1, z2) in seeds {
        if z1.im <= 0.0 || z2.im <= 0.0 {
            continue;
        }
        let t = match targets.iter().find(|p| p.0 == z1) {
            Some(p) => p.1,
            None => {
                let v = h.eval(z1).ok().filter(|v| v.is_finite());
                targets.push((z1, v));
                v
            }
        };
        let Some(target) = t else { continue };
        let Some(z) = newton(h, target, z2) else { continue };
        if (z - z1).norm() <= 1e-6 || z.im <= 0.0 {
            continue;
        }
        let (a, b) = if z1.im <= z.im { (z1, z) } else { (z, z1) };
        let p = a.im * b.im;
        let better = match best {
            None => true,
            Some((_, _, bp)) => p > bp * (1.0 + 1e-9),
        };
        if better {
            best = Some((a, b, p));
        }
    }
    best.map(|(a, b, _)| (a, b))
}

/// Largest `n` for which `▷`-`n`-divisibility is not excluded by the collision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DivisibilityBound {
    pub n_max: u64,
    /// `n_max = 0`: the collision is incompatible with the representation.
    pub contradiction: bool,
}

/// `n_max = ⌊ρ(ℝ) / (Im z1 Im z2)⌋`.
pub fn divisibility_bound(rep: &FiniteVarianceRep, collision: (C64, C64)) -> Result<DivisibilityBound> {
    if rep.rho_mass <= 0.0 {
        return Err(Error::ZeroVariance);
    }
    let q = rep.rho_mass / (collision.0.im * collision.1.im);
    let n_max = (q + 1e-9).floor().max(0.0) as u64;
    Ok(DivisibilityBound { n_max, contradiction: n_max == 0 })
}

/// Whether `m` can be tested with the finite-variance machinery.
pub fn has_finite_variance(m: &Measure) -> bool {
    match m {
        Measure::Family(Family::Stable { alpha, .. }) => *alpha == 2.0 || *alpha == 1.0,
        _ => mean_and_variance(m).is_ok(),
    }
}
