//! Boolean convolution through the K-transform, and the free counterexample
//! in which positivity of the support changes with time.

use crate::branch::sqrt_upper;
use crate::field::{Field, VectorField};
use crate::invert::{stieltjes_invert, InversionOptions};
use crate::measure::{AtomicMeasure, Measure};
use crate::roots::bisect;
use crate::semigroup::{subordinator_condition, PositivityVerdict};
use crate::transform::{atomic_partial_fractions, reciprocal_transform, Provenance, TransformEvaluator};
use crate::{Error, Result, C64};
use alloc::boxed::Box;
use alloc::vec::Vec;

type KFn<'a> = dyn Fn(C64) -> Result<C64> + Send + Sync + 'a;

/// `K(z) = z - H(z)`.
pub struct KTransform<'a> {
    f: Box<KFn<'a>>,
    pub provenance: Provenance,
}

impl<'a> KTransform<'a> {
    pub fn new<F>(f: F, provenance: Provenance) -> Self
    where
        F: Fn(C64) -> Result<C64> + Send + Sync + 'a,
    {
        KTransform { f: Box::new(f), provenance }
    }

    pub fn from_h(h: TransformEvaluator<'a>) -> Self {
        let p = h.provenance;
        KTransform::new(move |z| Ok(z - h.eval(z)?), p)
    }

    pub fn of(m: &'a Measure) -> Result<Self> {
        Ok(Self::from_h(reciprocal_transform(m)?))
    }

    pub fn eval(&self, z: C64) -> Result<C64> {
        (self.f)(z)
    }

    /// `z - K(z)`.
    pub fn to_h(self) -> TransformEvaluator<'a> {
        let p = self.provenance;
        TransformEvaluator::new(move |z| Ok(z - self.eval(z)?), p)
    }
}

/// `H_{μ⊎ν}(z) = H_μ(z) + H_ν(z) - z`.
pub fn boolean_h<'a>(mu: &'a Measure, nu: &'a Measure) -> Result<TransformEvaluator<'a>> {
    let hm = reciprocal_transform(mu)?;
    let hn = reciprocal_transform(nu)?;
    Ok(TransformEvaluator::new(move |z| Ok(hm.eval(z)? + hn.eval(z)? - z), Provenance::Composition))
}

/// Boolean convolution. Atomic inputs are handled exactly; anything else is
/// inverted on `xs`.
pub fn boolean_convolve(mu: &Measure, nu: &Measure, xs: &[f64]) -> Result<Measure> {
    if let (Some(a), Some(b)) = (as_atomic(mu), as_atomic(nu)) {
        return Ok(Measure::Atomic(boolean_convolve_atomic(&a, &b)?));
    }
    let h = boolean_h(mu, nu)?;
    Ok(Measure::Grid(stieltjes_invert(&h, xs, &InversionOptions::default())?))
}

fn as_atomic(m: &Measure) -> Option<AtomicMeasure> {
    match m {
        Measure::Atomic(a) => Some(a.clone()),
        _ => m.as_dirac().map(AtomicMeasure::dirac),
    }
}

/// `H = z + α + Σ β_k/(b_k - z)` is increasing between its poles, so each gap
/// and each outer half-line holds one zero; the weight there is `1/H'`.
pub fn boolean_convolve_atomic(mu: &AtomicMeasure, nu: &AtomicMeasure) -> Result<AtomicMeasure> {
    let (am, pm) = atomic_partial_fractions(mu)?;
    let (an, pn) = atomic_partial_fractions(nu)?;
    let alpha = am + an;
    let mut poles: Vec<(f64, f64)> = pm.into_iter().chain(pn).collect();
    poles.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(poles.len());
    for (x, w) in poles {
        match merged.last_mut() {
            Some(last) if (last.0 - x).abs() <= 1e-12 * (1.0 + x.abs()) => last.1 += w,
            _ => merged.push((x, w)),
        }
    }
    let h = |x: f64| x + alpha + merged.iter().map(|&(b, w)| w / (b - x)).sum::<f64>();
    let dh = |x: f64| 1.0 + merged.iter().map(|&(b, w)| w / ((b - x) * (b - x))).sum::<f64>();
    let s: f64 = merged.iter().map(|p| p.1).sum();
    let mut roots = Vec::with_capacity(merged.len() + 1);
    match (merged.first(), merged.last()) {
        (Some(&(first, _)), Some(&(last, _))) => {
            roots.push(bisect(h, first.min(-alpha) - 1.0 - s, first, -1.0));
            for k in 1..merged.len() {
                roots.push(bisect(h, merged[k - 1].0, merged[k].0, -1.0));
            }
            roots.push(bisect(h, last, last.max(-alpha) + 1.0 + s, -1.0));
        }
        _ => roots.push(-alpha),
    }
    AtomicMeasure::new(roots.into_iter().map(|x| (x, 1.0 / dh(x))).collect())
}

/// Boolean semigroup with `K_t = -t A`: `H_t(z) = z + t A(z)`.
pub fn boolean_semigroup(v: &VectorField, t: f64) -> TransformEvaluator<'_> {
    TransformEvaluator::new(move |z| Ok(z + v.eval(z)? * t), Provenance::Nevanlinna)
}

/// Same four conditions as the monotone subordinator test.
pub fn boolean_subordinator_check(gamma: f64, tau: &Measure) -> Result<PositivityVerdict> {
    subordinator_condition(gamma, tau)
}

/// `max |-K(-z̄) - conj K(z)| < 1e-9` over `sample`.
pub fn boolean_symmetry_check(k: &KTransform, sample: &[C64]) -> bool {
    sample.iter().all(|&z| match (k.eval(C64::new(-z.re, z.im)), k.eval(z)) {
        (Ok(a), Ok(b)) => (-a - b.conj()).norm() < 1e-9,
        _ => false,
    })
}

/// Parameters of the free counterexample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeCounterexampleParams {
    pub a: f64,
    pub c: f64,
    pub t: f64,
}

impl FreeCounterexampleParams {
    /// Branch point `at - t²/4 + c`.
    pub fn branch_point(&self) -> f64 {
        self.a * self.t - 0.25 * self.t * self.t + self.c
    }
}

/// `H_t(z) = z - at + t²/2 + t √(z - (at - t²/4 + c))`.
pub fn free_counterexample_h(p: &FreeCounterexampleParams, z: C64) -> C64 {
    let FreeCounterexampleParams { a, t, .. } = *p;
    z - a * t + 0.5 * t * t + sqrt_upper(z - p.branch_point()) * t
}

const POSITIVE_FROM: f64 = 1e-6;

/// Mass of `μ_t` on `(1e-6, ∞)`, by inversion on a Chebyshev grid.
pub fn free_positive_mass(p: &FreeCounterexampleParams) -> Result<f64> {
    if p.t == 0.0 {
        return Ok(0.0);
    }
    let zb = p.branch_point();
    // any zero of H to the right of the branch point lies below at - t²/2
    let hi = zb.max(p.a * p.t - 0.5 * p.t * p.t);
    if hi <= POSITIVE_FROM {
        return Ok(0.0);
    }
    let hi = hi + 1.0;
    let q = *p;
    let h = TransformEvaluator::new(move |z| Ok(free_counterexample_h(&q, z)), Provenance::ClosedForm);
    let xs = crate::grid::chebyshev(POSITIVE_FROM, hi, 400);
    let mut opts = InversionOptions::default();
    if zb > POSITIVE_FROM {
        opts.atom_hints.push(zb);
    }
    let g = stieltjes_invert(&h, &xs, &opts)?;
    let atoms: f64 = g.atoms.atoms().iter().filter(|a| a.0 > POSITIVE_FROM).map(|a| a.1).sum();
    Ok(g.density_mass() + atoms)
}

/// Whether `μ_t ⊂ (-∞, 0]` (mass beyond `1e-6` below `1e-3`) at each time.
pub fn free_positivity_timeline(p: &FreeCounterexampleParams, ts: &[f64]) -> Result<Vec<bool>> {
    ts.iter()
        .map(|&t| {
            if !(t.is_finite() && t >= 0.0) {
                return Err(Error::InvalidArgument("times must be non-negative".into()));
            }
            Ok(free_positive_mass(&FreeCounterexampleParams { t, ..*p })? < 1e-3)
        })
        .collect()
}

/// Bisection for the time at which the timeline switches, given a bracket
/// with different verdicts at its ends.
pub fn free_transition_time(p: &FreeCounterexampleParams, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let verdict = |t: f64| free_positivity_timeline(p, &[t]).map(|v| v[0]);
    let v_lo = verdict(lo)?;
    if v_lo == verdict(hi)? {
        return Err(Error::InvalidArgument("bracket does not contain a transition".into()));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if verdict(mid)? == v_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
