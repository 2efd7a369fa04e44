//! Cauchy and reciprocal Cauchy transforms.

use crate::branch::sqrt_upper;
use crate::field::VectorField;
use crate::measure::{AtomicMeasure, Family, GridMeasure, Measure};
use crate::{Error, Result, C64};
use alloc::boxed::Box;
#[allow(unused_imports)]
use num_traits::Float;

/// Where an evaluator's values come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Measure,
    ClosedForm,
    Flow,
    Composition,
    Nevanlinna,
}

type EvalFn<'a> = dyn Fn(C64) -> Result<C64> + Send + Sync + 'a;

/// A reciprocal Cauchy transform `H` as a callable.
pub struct TransformEvaluator<'a> {
    f: Box<EvalFn<'a>>,
    pub provenance: Provenance,
}

impl<'a> TransformEvaluator<'a> {
    pub fn new<F>(f: F, provenance: Provenance) -> Self
    where
        F: Fn(C64) -> Result<C64> + Send + Sync + 'a,
    {
        TransformEvaluator { f: Box::new(f), provenance }
    }

    pub fn eval(&self, z: C64) -> Result<C64> {
        (self.f)(z)
    }

    /// Cauchy transform `1/H`.
    pub fn cauchy(&self, z: C64) -> Result<C64> {
        let h = self.eval(z)?;
        if h == C64::new(0.0, 0.0) {
            return Err(Error::PoleAt(z.re));
        }
        Ok(h.inv())
    }

    /// `z ↦ H(z) - x`, the transform of `δ_x ▷ μ`.
    pub fn shifted(&'a self, x: f64) -> TransformEvaluator<'a> {
        TransformEvaluator::new(move |z| Ok(self.eval(z)? - x), Provenance::Composition)
    }
}

/// `∫ dμ(x)/(z - x)`.
pub fn cauchy_transform(m: &Measure, z: C64) -> Result<C64> {
    if let Measure::Atomic(a) = m {
        if z.im == 0.0 {
            if let Some(&(x, _)) = a.atoms().iter().find(|at| at.0 == z.re) {
                return Err(Error::PoleAt(x));
            }
        }
    }
    m.cauchy(z)
}

/// Reciprocal Cauchy transform of `m` as an evaluator.
pub fn reciprocal_transform(m: &Measure) -> Result<TransformEvaluator<'_>> {
    m.validate()?;
    Ok(match m {
        Measure::Family(f) => {
            let f = *f;
            TransformEvaluator::new(move |z| family_h(&f, z), Provenance::ClosedForm)
        }
        _ => TransformEvaluator::new(
            move |z| {
                let g = cauchy_transform(m, z)?;
                if g.norm() < 1e-300 {
                    return Err(Error::ZeroG);
                }
                Ok(g.inv())
            },
            Provenance::Measure,
        ),
    })
}

/// Closed-form `H` of a family member.
pub fn family_h(f: &Family, z: C64) -> Result<C64> {
    Ok(match *f {
        Family::Dirac { a } => z - a,
        Family::Arcsine { t } => sqrt_upper(z * z - 2.0 * t),
        Family::DeformedArcsine { t, c } => {
            let w = z - c;
            sqrt_upper(w * w - 2.0 * t) + c
        }
        Family::Stable { alpha, b, c, t } => crate::stable::stable_h(alpha, b, c, t, z)?,
        Family::MonotonePoisson { lambda, t } => monotone_poisson_h(lambda, t, z)?,
    })
}

fn monotone_poisson_h(lambda: f64, t: f64, z: C64) -> Result<C64> {
    if t == 0.0 {
        return Ok(z);
    }
    let v = VectorField::monotone_poisson(lambda);
    let mut h = crate::semigroup::flow(&v, z, t, &Default::default())?;
    if z.im > 0.0 {
        // Newton on Log H - H = Log z - z + λt, which the flow satisfies.
        let target = z.ln() - z + lambda * t;
        for _ in 0..8 {
            let r = h.ln() - h - target;
            let d = h.inv() - 1.0;
            let step = r / d;
            if !(step.re.is_finite() && step.im.is_finite()) {
                break;
            }
            let hn = h - step;
            if hn.im <= 0.0 {
                break;
            }
            h = hn;
            if step.norm() < 1e-15 * (1.0 + h.norm()) {
                break;
            }
        }
    }
    Ok(h)
}

/// `left ∘ right`: the transform of `μ_left ▷ μ_right`.
pub fn monotone_compose<'a>(left: &'a TransformEvaluator<'a>, right: &'a TransformEvaluator<'a>) -> TransformEvaluator<'a> {
    TransformEvaluator::new(move |z| left.eval(right.eval(z)?), Provenance::Composition)
}

/// Lower and upper ends of the closed support (possibly infinite).
pub fn support_bounds(m: &Measure) -> Result<(f64, f64)> {
    match m {
        Measure::Atomic(a) => {
            if a.is_empty() {
                return Err(Error::InvalidMeasure("empty measure".into()));
            }
            Ok((a.atoms()[0].0, a.atoms()[a.len() - 1].0))
        }
        Measure::Grid(g) => Ok(grid_support(g)),
        Measure::Family(f) => family_support(f),
    }
}

fn grid_support(g: &GridMeasure) -> (f64, f64) {
    let peak = g.density.iter().cloned().fold(0.0, f64::max);
    let thr = 1e-12 * peak.max(1e-300);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (j, &d) in g.density.iter().enumerate() {
        if d > thr {
            let l = if j > 0 { g.xs[j - 1] } else { g.xs[j] };
            let h = if j + 1 < g.xs.len() { g.xs[j + 1] } else { g.xs[j] };
            lo = lo.min(l);
            hi = hi.max(h);
        }
    }
    for &(x, _) in g.atoms.atoms() {
        lo = lo.min(x);
        hi = hi.max(x);
    }
    if g.left_tail.is_some() {
        lo = f64::NEG_INFINITY;
    }
    if g.right_tail.is_some() {
        hi = f64::INFINITY;
    }
    (lo, hi)
}

fn family_support(f: &Family) -> Result<(f64, f64)> {
    f.validate()?;
    Ok(match *f {
        Family::Dirac { a } => (a, a),
        Family::Arcsine { t } => {
            let r = (2.0 * t).sqrt();
            (-r, r)
        }
        Family::DeformedArcsine { t, c } => {
            let r = (2.0 * t).sqrt();
            let atom = (c * c + 2.0 * t).sqrt();
            let (mut lo, mut hi) = (c - r, c + r);
            if c > 0.0 {
                lo = lo.min(c - atom);
            } else if c < 0.0 {
                hi = hi.max(c + atom);
            }
            (lo, hi)
        }
        Family::MonotonePoisson { lambda, t } => {
            if t == 0.0 {
                return Ok((0.0, 0.0));
            }
            let v = VectorField::monotone_poisson(lambda);
            let up = crate::semigroup::support_edge(&crate::field::Reflected(&v), t, 1)?;
            (0.0, -up.edge[1])
        }
        Family::Stable { alpha, b, c, t } => crate::stable::stable_hull(alpha, b, c, t),
    })
}

/// Sample a family on a grid adapted to its support and invert.
pub fn sample_family(f: &Family, n: usize) -> Result<GridMeasure> {
    let (lo, hi) = family_support(f)?;
    let h = TransformEvaluator::new(move |z| family_h(f, z), Provenance::ClosedForm);
    let (lo, hi) = if lo.is_finite() && hi.is_finite() && hi > lo {
        (lo, hi)
    } else {
        return Err(Error::Unsupported("sampling a family with unbounded support".into()));
    };
    let pad = 1e-3 * (hi - lo);
    let mut xs = crate::grid::chebyshev(lo, hi, n);
    xs.insert(0, lo - pad);
    xs.push(hi + pad);
    let mut opts = crate::invert::InversionOptions::default();
    opts.atom_hints.extend([lo, hi]);
    crate::invert::stieltjes_invert(&h, &xs, &opts)
}

/// Hull of `supp(ν ▷ μ)`.
///
/// `outer` contains the support. `inner` holds the guaranteed extent: the
/// support reaches at least down to `inner.0` and up to `inner.1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportEstimate {
    pub outer: (f64, f64),
    pub inner: (f64, f64),
}

pub fn conv_support_bounds(nu: &Measure, mu: &Measure) -> Result<SupportEstimate> {
    let (an, bn) = support_bounds(nu)?;
    let (am, bm) = support_bounds(mu)?;
    let outer = (am + an.min(0.0), bm + bn.max(0.0));
    let inner = if an <= 0.0 && bn >= 0.0 {
        (am, bm)
    } else if bn <= 0.0 {
        (am, bn + bm)
    } else {
        (an + am, bm)
    };
    Ok(SupportEstimate { outer, inner })
}

/// Reciprocal transform of an atomic measure written as
/// `α + z + Σ β_k/(b_k - z)` with poles between consecutive atoms.
pub fn atomic_partial_fractions(nu: &AtomicMeasure) -> Result<(f64, alloc::vec::Vec<(f64, f64)>)> {
    if nu.is_empty() {
        return Err(Error::InvalidMeasure("empty measure".into()));
    }
    let mass = nu.mass();
    let at = nu.atoms();
    let mean = at.iter().map(|a| a.0 * a.1).sum::<f64>() / mass;
    let g = |x: f64| at.iter().map(|&(a, w)| w / (x - a)).sum::<f64>() / mass;
    let mut poles = alloc::vec::Vec::with_capacity(at.len().saturating_sub(1));
    for k in 1..at.len() {
        let b = crate::roots::bisect(g, at[k - 1].0, at[k].0, 1.0);
        let gp: f64 = at.iter().map(|&(a, w)| w / ((b - a) * (b - a))).sum::<f64>() / mass;
        poles.push((b, 1.0 / gp));
    }
    Ok((-mean, poles))
}
