//! Holomorphic vector fields generating monotone convolution semigroups.
//!
//! A field is `A(z) = -γ + ∫ (1 + x z)/(x - z) dτ(x)` with `τ` a finite
//! measure. Each `(γ, τ)` pair gives one field and one semigroup.

use crate::measure::{AtomicMeasure, Measure, Tail};
use crate::{Error, Result, C64};
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

/// Anything that can drive a flow: a holomorphic self-map direction
/// `A: ℂ⁺ → ℂ⁺ ∪ ℝ` whose Lévy measure lies in `[lower(), upper()]`.
pub trait Field {
    fn eval(&self, z: C64) -> Result<C64>;

    /// `A'(z)`. The default uses a central difference.
    fn deriv(&self, z: C64) -> Result<C64> {
        let h = 1e-6 * (1.0 + z.norm());
        let d = C64::new(h, 0.0);
        Ok((self.eval(z + d)? - self.eval(z - d)?) / (2.0 * h))
    }

    /// Left end of the Lévy measure's support; `+∞` when it is zero.
    fn lower(&self) -> f64;
    /// Right end; `-∞` when it is zero.
    fn upper(&self) -> f64;
    /// `lim A(u)` as `u → -∞` along the real axis.
    fn limit_minus_infinity(&self) -> f64;

    /// `A(u)` for real `u` off the support, boundary value from above.
    fn eval_real(&self, u: f64) -> Result<f64> {
        let v = self.eval(C64::new(u, 0.0))?;
        if v.im.abs() > 1e-9 * (1.0 + v.re.abs()) {
            return Err(Error::CaseMismatch);
        }
        Ok(v.re)
    }
}

/// The field given by a pair `(γ, τ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub gamma: f64,
    pub tau: Measure,
}

impl VectorField {
    pub fn new(gamma: f64, tau: Measure) -> Result<Self> {
        if !gamma.is_finite() {
            return Err(Error::InvalidArgument("gamma must be finite".into()));
        }
        tau.validate()?;
        Ok(VectorField { gamma, tau })
    }

    pub fn atomic(gamma: f64, atoms: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(gamma, Measure::Atomic(AtomicMeasure::new(atoms)?))
    }

    /// `A(z) = -1/z`, generating the arcsine semigroup.
    pub fn arcsine() -> Self {
        VectorField { gamma: 0.0, tau: Measure::dirac(0.0) }
    }

    /// `A(z) = -1/(2(z - c))`.
    pub fn deformed_arcsine(c: f64) -> Self {
        let s = 2.0 * (1.0 + c * c);
        VectorField { gamma: -c / s, tau: Measure::Atomic(AtomicMeasure::dirac(c).scaled(1.0 / s)) }
    }

    /// `A(z) = λ z/(1 - z)`.
    pub fn monotone_poisson(lambda: f64) -> Self {
        VectorField { gamma: 0.5 * lambda, tau: Measure::Atomic(AtomicMeasure::dirac(1.0).scaled(0.5 * lambda)) }
    }

    fn atoms_of_tau(&self) -> Option<&AtomicMeasure> {
        match &self.tau {
            Measure::Atomic(a) => Some(a),
            _ => None,
        }
    }

    /// `∫ x dτ`.
    pub fn tau_first_moment(&self) -> Result<f64> {
        match &self.tau {
            Measure::Atomic(a) => Ok(a.atoms().iter().map(|&(x, w)| x * w).sum()),
            Measure::Grid(g) => Ok(g.moments(1)?[1]),
            Measure::Family(_) => Ok(crate::moments::moments_of(&self.tau, 1)?[1]),
        }
    }
}

/// `A(z)` for the pair `(γ, τ)`.
pub fn field_eval(v: &VectorField, z: C64) -> Result<C64> {
    let mut s = C64::new(-v.gamma, 0.0);
    match &v.tau {
        Measure::Atomic(a) => {
            for &(x, w) in a.atoms() {
                let d = x - z;
                if d.re == 0.0 && d.im == 0.0 {
                    return Err(Error::PoleAt(x));
                }
                s += w * (1.0 + x * z) / d;
            }
        }
        Measure::Grid(g) => {
            let n = g.xs.len();
            for j in 0..n {
                let wj = match j {
                    0 => 0.5 * (g.xs[1] - g.xs[0]),
                    _ if j == n - 1 => 0.5 * (g.xs[n - 1] - g.xs[n - 2]),
                    _ => 0.5 * (g.xs[j + 1] - g.xs[j - 1]),
                };
                let x = g.xs[j];
                if g.density[j] != 0.0 {
                    let d = x - z;
                    if d.re == 0.0 && d.im == 0.0 {
                        return Err(Error::PoleAt(x));
                    }
                    s += g.density[j] * wj * (1.0 + x * z) / d;
                }
            }
            for &(x, w) in g.atoms.atoms() {
                let d = x - z;
                if d.re == 0.0 && d.im == 0.0 {
                    return Err(Error::PoleAt(x));
                }
                s += w * (1.0 + x * z) / d;
            }
            if let Some(t) = g.right_tail {
                s += tail_term(t, g.xs[n - 1], z)?;
            }
            if let Some(t) = g.left_tail {
                s -= tail_term(t, -g.xs[0], -z)?;
            }
        }
        Measure::Family(_) => {
            // (1 + xz)/(x - z) = z + (1 + z^2)/(x - z)
            let g = crate::transform::cauchy_transform(&v.tau, z)?;
            s += z + (1.0 + z * z) * g;
        }
    }
    Ok(s)
}

/// `∫_{x0}^∞ (1 + xz)/(x - z) c x^{-p} dx`; the left tail is `-tail_term(t, -x_min, -z)`.
fn tail_term(t: Tail, x0: f64, z: C64) -> Result<C64> {
    if !(x0 > 0.0) || t.exponent <= 1.0 {
        return Err(Error::Unsupported("tail must start away from 0 and decay faster than 1/x".into()));
    }
    let p = t.exponent;
    if z.norm() < 0.5 * x0 {
        // (1 + xz)/(x - z) = z + (1 + z²) Σ_k z^k / x^{k+1}
        let mut acc = z * x0.powf(1.0 - p) / (p - 1.0);
        let mut zk = C64::new(1.0, 0.0);
        let q = 1.0 + z * z;
        for k in 0..200 {
            let term = q * zk * x0.powf(-p - k as f64) / (p + k as f64);
            acc += term;
            if term.norm() <= 1e-17 * acc.norm() {
                break;
            }
            zk *= z;
        }
        return Ok(acc * t.coef);
    }
    // x = x0/u
    let f = |u: f64, part: bool| {
        let x = x0 / u;
        let v = (1.0 + x * z) / (x - z) * (x.powf(-p) * x0 / (u * u));
        if part {
            v.im
        } else {
            v.re
        }
    };
    let re = crate::quad::integrate(|u| f(u, false), 0.0, 1.0, 1e-12).value;
    let im = crate::quad::integrate(|u| f(u, true), 0.0, 1.0, 1e-12).value;
    Ok(C64::new(re, im) * t.coef)
}

impl Field for VectorField {
    fn eval(&self, z: C64) -> Result<C64> {
        field_eval(self, z)
    }

    fn deriv(&self, z: C64) -> Result<C64> {
        if let Some(a) = self.atoms_of_tau() {
            return Ok(a.atoms().iter().map(|&(x, w)| w * (1.0 + x * x) / ((x - z) * (x - z))).sum());
        }
        let h = 1e-6 * (1.0 + z.norm());
        let d = C64::new(h, 0.0);
        Ok((self.eval(z + d)? - self.eval(z - d)?) / (2.0 * h))
    }

    fn lower(&self) -> f64 {
        match crate::transform::support_bounds(&self.tau) {
            Ok((lo, _)) if self.tau.total_mass() > 0.0 => lo,
            _ => f64::INFINITY,
        }
    }

    fn upper(&self) -> f64 {
        match crate::transform::support_bounds(&self.tau) {
            Ok((_, hi)) if self.tau.total_mass() > 0.0 => hi,
            _ => f64::NEG_INFINITY,
        }
    }

    fn limit_minus_infinity(&self) -> f64 {
        // (1 + x u)/(x - u) → -x as u → -∞
        match self.tau_first_moment() {
            Ok(m1) => -self.gamma - m1,
            Err(_) => f64::NEG_INFINITY,
        }
    }
}

/// Field of the reflected semigroup `x ↦ -x`: `Ã(z) = -conj(A(-conj z))`.
pub struct Reflected<'a, F: Field + ?Sized>(pub &'a F);

impl<F: Field + ?Sized> Field for Reflected<'_, F> {
    fn eval(&self, z: C64) -> Result<C64> {
        Ok(-self.0.eval(C64::new(-z.re, z.im))?.conj())
    }

    fn deriv(&self, z: C64) -> Result<C64> {
        Ok(self.0.deriv(C64::new(-z.re, z.im))?.conj())
    }

    fn lower(&self) -> f64 {
        -self.0.upper()
    }

    fn upper(&self) -> f64 {
        -self.0.lower()
    }

    fn limit_minus_infinity(&self) -> f64 {
        // Ã(u) = -A(-u) for real u
        let mut u = 1e6 * (1.0 + self.0.upper().abs().min(1e6));
        let mut last = f64::NAN;
        for _ in 0..4 {
            match self.0.eval_real(u) {
                Ok(v) => last = -v,
                Err(_) => break,
            }
            u *= 10.0;
        }
        last
    }
}

/// Coefficients `r_n` of `A(z) = -Σ_{n≥1} r_n z^{1-n}` near infinity:
/// `r_1 = γ + ∫ x dτ`, `r_n = ∫ x^{n-2} (1 + x^2) dτ` for `n ≥ 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldCoefficients {
    /// `r[0]` holds `r_1`.
    pub r: Vec<f64>,
}

impl FieldCoefficients {
    pub fn get(&self, n: usize) -> f64 {
        if n == 0 {
            return 0.0;
        }
        self.r.get(n - 1).copied().unwrap_or(0.0)
    }

    /// Coefficients up to `r_n` of a field whose Lévy measure is compactly supported.
    pub fn from_field(v: &VectorField, n: usize) -> Result<Self> {
        let mom = crate::moments::moments_of(&v.tau, n.max(2))?;
        let mut r = Vec::with_capacity(n);
        r.push(v.gamma + mom.get(1).copied().unwrap_or(0.0));
        for k in 2..=n {
            let j = k - 2;
            r.push(mom[j] + mom[j + 2]);
        }
        r.truncate(n);
        Ok(FieldCoefficients { r })
    }
}
