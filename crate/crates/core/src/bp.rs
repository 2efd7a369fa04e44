//! The monotone Bercovici–Pata map between classical Lévy–Khintchine pairs
//! and monotone vector fields.

use crate::field::VectorField;
use crate::measure::{AtomicMeasure, Family, GridMeasure, Measure, Tail};
use crate::semigroup::{subordinator_condition, PositivityVerdict};
use crate::{Error, Result, C64};
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

/// Classical infinitely divisible law through `(γ, τ)`:
/// `exp(iγu + ∫ (e^{ixu} - 1 - ixu/(1+x²)) (1+x²)/x² τ(dx))`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalTriple {
    pub gamma: f64,
    pub tau: Measure,
}

/// The pair is carried over unchanged.
pub fn lambda_m(c: &ClassicalTriple) -> VectorField {
    VectorField { gamma: c.gamma, tau: c.tau.clone() }
}

pub fn lambda_m_inverse(v: &VectorField) -> ClassicalTriple {
    ClassicalTriple { gamma: v.gamma, tau: v.tau.clone() }
}

/// `(e^{is} - 1 - is)/s²`, continuous at `0`.
fn phi2(s: f64) -> C64 {
    if s.abs() < 1e-3 {
        // Σ_{k≥2} (is)^k / (k! s²)
        let mut term = C64::new(-0.5, 0.0);
        let mut acc = term;
        for k in 3..10 {
            term = term * C64::new(0.0, s) / k as f64;
            acc += term;
        }
        acc
    } else {
        (C64::new(0.0, s).exp() - 1.0 - C64::new(0.0, s)) / (s * s)
    }
}

/// Exponent integrand `(e^{ixu} - 1 - ixu/(1+x²))(1+x²)/x²`, with value
/// `-u²/2` at `x = 0`.
fn lk_integrand(x: f64, u: f64) -> C64 {
    phi2(x * u) * (u * u * (1.0 + x * x)) + C64::new(0.0, x * u)
}

/// Classical characteristic function at `u`. Grid tails beyond the last node are ignored.
pub fn classical_cf(c: &ClassicalTriple, u: f64) -> Result<C64> {
    let mut e = C64::new(0.0, c.gamma * u);
    let atoms = |a: &AtomicMeasure| a.atoms().iter().map(|&(x, w)| lk_integrand(x, u) * w).sum::<C64>();
    match &c.tau {
        Measure::Atomic(a) => e += atoms(a),
        Measure::Grid(g) => {
            let ys: Vec<C64> = g.xs.iter().zip(&g.density).map(|(&x, &d)| lk_integrand(x, u) * d).collect();
            for j in 1..g.xs.len() {
                e += (ys[j - 1] + ys[j]) * (0.5 * (g.xs[j] - g.xs[j - 1]));
            }
            e += atoms(&g.atoms);
        }
        Measure::Family(Family::Dirac { a }) => e += lk_integrand(*a, u),
        Measure::Family(_) => return Err(Error::Unsupported("characteristic function with a family-valued Levy measure".into())),
    }
    Ok(e.exp())
}

/// The pair of `λ A(z/λ)`.
pub fn dilation_conjugate(v: &VectorField, lambda: f64) -> Result<VectorField> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidArgument("dilation factor must be positive".into()));
    }
    let l2 = lambda * lambda;
    let weight = |x: f64| l2 * (1.0 + x * x) / (1.0 + l2 * x * x);
    let drift = |x: f64| x * (1.0 - l2) / (1.0 + l2 * x * x);
    let map_atoms = |a: &AtomicMeasure| -> Result<(AtomicMeasure, f64)> {
        let d = a.atoms().iter().map(|&(x, w)| w * drift(x)).sum::<f64>();
        let at = AtomicMeasure::new(a.atoms().iter().map(|&(x, w)| (lambda * x, w * weight(x))).collect())?;
        Ok((at, d))
    };
    let (tau, shift) = match &v.tau {
        Measure::Atomic(a) => {
            let (at, d) = map_atoms(a)?;
            (Measure::Atomic(at), d)
        }
        Measure::Family(Family::Dirac { a }) => {
            let (at, d) = map_atoms(&AtomicMeasure::dirac(*a))?;
            (Measure::Atomic(at), d)
        }
        Measure::Grid(g) => {
            let (at, mut d) = map_atoms(&g.atoms)?;
            let ys: Vec<f64> = g.xs.iter().zip(&g.density).map(|(&x, &p)| p * drift(x)).collect();
            for j in 1..g.xs.len() {
                d += 0.5 * (ys[j - 1] + ys[j]) * (g.xs[j] - g.xs[j - 1]);
            }
            let xs = g.xs.iter().map(|x| lambda * x).collect();
            // density in the new variable: λ (1+x²)/(1+λ²x²) p(x)
            let dens = g.xs.iter().zip(&g.density).map(|(&x, &p)| p * weight(x) / lambda).collect();
            let tail = |t: Option<Tail>| t.map(|t| Tail { coef: t.coef * lambda.powf(t.exponent - 1.0), exponent: t.exponent });
            let ng = GridMeasure::new(xs, dens, at)?.with_tails(tail(g.left_tail), tail(g.right_tail));
            (Measure::Grid(ng), d)
        }
        Measure::Family(_) => return Err(Error::Unsupported("dilation of a family-valued Levy measure".into())),
    };
    Ok(VectorField { gamma: lambda * v.gamma + lambda * shift, tau })
}

/// Window and resolution for [`stable_pair_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableWindow {
    /// `τ` is kept on `[-half_width, half_width]`.
    pub half_width: f64,
    /// Smallest `|x|` on the grid.
    pub inner: f64,
    /// Log-spaced nodes per side.
    pub points: usize,
}

impl Default for StableWindow {
    fn default() -> Self {
        StableWindow { half_width: 1e4, inner: 1e-8, points: 50_000 }
    }
}

/// Pair of the stable field `b z^{1-α}` on the default window.
pub fn stable_pair(alpha: f64, b: C64) -> Result<VectorField> {
    stable_pair_with(alpha, b, StableWindow::default())
}

/// `(1+x²)/x² τ(dx) = c₁ x^{-1-α}` on `x > 0`, `c₂ |x|^{-1-α}` on `x < 0` with
/// `c₁ = Im b/π`, `c₂ = Im(b e^{iπ(1-α)})/π` and `γ = Im(b e^{-iπα/2})`.
pub fn stable_pair_with(alpha: f64, b: C64, w: StableWindow) -> Result<VectorField> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::InvalidArgument("stable index must lie in (0, 2)".into()));
    }
    if !crate::stable::stable_valid(alpha, b, C64::new(0.0, 0.0)) {
        return Err(Error::InvalidArgument("stable parameter outside the admissible sector".into()));
    }
    let c1 = b.im / PI;
    let c2 = (b * C64::from_polar(1.0, PI * (1.0 - alpha))).im / PI;
    let gamma = (b * C64::from_polar(1.0, -PI * alpha / 2.0)).im;
    let pos = crate::grid::log_spaced(w.inner, w.half_width, w.points);
    let dens = |x: f64, c: f64| c * x.powf(1.0 - alpha) / (1.0 + x * x);
    let mut xs = Vec::with_capacity(2 * w.points + 1);
    let mut d = Vec::with_capacity(2 * w.points + 1);
    for &x in pos.iter().rev() {
        xs.push(-x);
        d.push(dens(x, c2));
    }
    xs.push(0.0);
    d.push(0.0);
    for &x in &pos {
        xs.push(x);
        d.push(dens(x, c1));
    }
    let tail = |c: f64| (c > 0.0).then_some(Tail { coef: c, exponent: 1.0 + alpha });
    let g = GridMeasure::new(xs, d, AtomicMeasure::empty())?.with_tails(tail(c2), tail(c1));
    Ok(VectorField { gamma, tau: Measure::Grid(g) })
}

/// Classical condition for a subordinator, on the same pair.
pub fn classical_positivity_condition(c: &ClassicalTriple) -> Result<PositivityVerdict> {
    subordinator_condition(c.gamma, &c.tau)
}
