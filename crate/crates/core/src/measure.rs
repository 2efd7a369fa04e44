//! Finite measures on the real line: atomic, sampled and closed-form families.

use crate::error::invalid;
use crate::{Error, Result, C64};
use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

/// Relative distance under which two atoms are merged.
pub const MERGE_TOL: f64 = 1e-12;
/// Tolerance on the total mass of an exact probability measure.
pub const PROB_TOL: f64 = 1e-9;
/// Tolerance on the total mass of a sampled probability measure.
pub const GRID_PROB_TOL: f64 = 1e-3;

/// Finitely many weighted points, sorted by position, weights positive.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AtomicMeasure {
    atoms: Vec<(f64, f64)>,
}

impl AtomicMeasure {
    /// Sort, drop zero weights and merge coincident positions.
    pub fn new(mut atoms: Vec<(f64, f64)>) -> Result<Self> {
        for &(x, w) in &atoms {
            if !x.is_finite() || !w.is_finite() {
                return Err(Error::InvalidMeasure(format!("non-finite atom ({x}, {w})")));
            }
            if w < 0.0 {
                return Err(Error::InvalidMeasure(format!("negative weight {w} at {x}")));
            }
        }
        atoms.retain(|a| a.1 > 0.0);
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for (x, w) in atoms {
            if let Some(last) = merged.last_mut() {
                if (x - last.0).abs() <= MERGE_TOL * (1.0 + x.abs().max(last.0.abs())) {
                    let tw = last.1 + w;
                    last.0 = (last.0 * last.1 + x * w) / tw;
                    last.1 = tw;
                    continue;
                }
            }
            merged.push((x, w));
        }
        Ok(AtomicMeasure { atoms: merged })
    }

    /// As [`AtomicMeasure::new`] but also require total mass one.
    pub fn probability(atoms: Vec<(f64, f64)>) -> Result<Self> {
        let m = Self::new(atoms)?;
        let s = m.mass();
        if (s - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidMeasure(format!("weights sum to {s}, not 1")));
        }
        if m.atoms.is_empty() {
            return Err(invalid("empty probability measure"));
        }
        Ok(m)
    }

    pub fn dirac(a: f64) -> Self {
        AtomicMeasure { atoms: alloc::vec![(a, 1.0)] }
    }

    pub fn empty() -> Self {
        AtomicMeasure { atoms: Vec::new() }
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn positions(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.0).collect()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    /// Cauchy transform `∫ 1/(z-x) dμ`.
    pub fn cauchy(&self, z: C64) -> C64 {
        self.atoms.iter().map(|&(x, w)| w / (z - x)).sum()
    }

    /// Multiply all weights by `s >= 0`.
    pub fn scaled(&self, s: f64) -> Self {
        let atoms = self.atoms.iter().map(|&(x, w)| (x, w * s)).collect();
        AtomicMeasure::new(atoms).unwrap_or_default()
    }

    /// Raw moments of order `0..=n`.
    pub fn moments(&self, n: usize) -> Vec<f64> {
        (0..=n).map(|k| self.atoms.iter().map(|&(x, w)| w * x.powi(k as i32)).sum()).collect()
    }
}

/// Power-law tail `coef * |x|^(-exponent)` beyond the end of a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tail {
    pub coef: f64,
    pub exponent: f64,
}

impl Tail {
    /// `∫_{|x| > r} |x|^k coef |x|^-p dx` on one side, `None` if divergent.
    pub fn abs_moment_beyond(&self, r: f64, k: usize) -> Option<f64> {
        let q = self.exponent - k as f64 - 1.0;
        if q <= 0.0 || r <= 0.0 {
            return None;
        }
        Some(self.coef * r.powf(-q) / q)
    }
}

/// Density sampled on an increasing grid, plus atoms and optional tails.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMeasure {
    pub xs: Vec<f64>,
    pub density: Vec<f64>,
    pub atoms: AtomicMeasure,
    pub left_tail: Option<Tail>,
    pub right_tail: Option<Tail>,
    pub probability: bool,
}

impl GridMeasure {
    /// Validate a finite (not necessarily probability) sampled measure.
    pub fn new(xs: Vec<f64>, density: Vec<f64>, atoms: AtomicMeasure) -> Result<Self> {
        if xs.len() < 2 || xs.len() != density.len() {
            return Err(Error::InvalidMeasure(format!(
                "grid needs >= 2 points and matching density ({} vs {})",
                xs.len(),
                density.len()
            )));
        }
        if !xs.windows(2).all(|w| w[0] < w[1]) || xs.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidMeasure(format!("grid abscissae must be finite and strictly increasing")));
        }
        if density.iter().any(|d| !d.is_finite() || *d < 0.0) {
            return Err(Error::InvalidMeasure(format!("density must be finite and non-negative")));
        }
        Ok(GridMeasure { xs, density, atoms, left_tail: None, right_tail: None, probability: false })
    }

    /// Validate and require total mass one within [`GRID_PROB_TOL`].
    pub fn probability(xs: Vec<f64>, density: Vec<f64>, atoms: AtomicMeasure) -> Result<Self> {
        let mut g = Self::new(xs, density, atoms)?;
        let m = g.total_mass();
        if (m - 1.0).abs() > GRID_PROB_TOL {
            return Err(Error::InvalidMeasure(format!("sampled measure has mass {m}, not 1")));
        }
        g.probability = true;
        Ok(g)
    }

    pub fn with_tails(mut self, left: Option<Tail>, right: Option<Tail>) -> Self {
        self.left_tail = left;
        self.right_tail = right;
        self
    }

    /// Trapezoid mass of the density.
    pub fn density_mass(&self) -> f64 {
        crate::quad::trapezoid(&self.xs, &self.density)
    }

    /// Density mass, atoms and declared tails.
    pub fn total_mass(&self) -> f64 {
        let mut m = self.density_mass() + self.atoms.mass();
        let lo = self.xs[0];
        let hi = self.xs[self.xs.len() - 1];
        if let Some(t) = self.left_tail {
            m += t.abs_moment_beyond(-lo.min(-1e-300), 0).unwrap_or(f64::INFINITY);
        }
        if let Some(t) = self.right_tail {
            m += t.abs_moment_beyond(hi.max(1e-300), 0).unwrap_or(f64::INFINITY);
        }
        m
    }

    /// Linear interpolation of the density; zero outside the grid.
    pub fn density_at(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x < self.xs[0] || x > self.xs[n - 1] {
            return 0.0;
        }
        let j = self.xs.partition_point(|&v| v <= x).min(n - 1).max(1);
        let (x0, x1) = (self.xs[j - 1], self.xs[j]);
        let (d0, d1) = (self.density[j - 1], self.density[j]);
        d0 + (d1 - d0) * (x - x0) / (x1 - x0)
    }

    /// Mass of `[lo, hi]` from the interpolated density and atoms inside.
    pub fn mass_in(&self, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        let mut m = 0.0;
        for j in 1..self.xs.len() {
            let (a, b) = (self.xs[j - 1].max(lo), self.xs[j].min(hi));
            if b > a {
                m += 0.5 * (b - a) * (self.density_at(a) + self.density_at(b));
            }
        }
        m + self.atoms.atoms().iter().filter(|a| a.0 >= lo && a.0 <= hi).map(|a| a.1).sum::<f64>()
    }

    /// Cauchy transform by trapezoid quadrature over the grid.
    pub fn cauchy(&self, z: C64) -> C64 {
        let n = self.xs.len();
        let mut s = C64::new(0.0, 0.0);
        for j in 0..n {
            let w = match j {
                0 => 0.5 * (self.xs[1] - self.xs[0]),
                _ if j == n - 1 => 0.5 * (self.xs[n - 1] - self.xs[n - 2]),
                _ => 0.5 * (self.xs[j + 1] - self.xs[j - 1]),
            };
            if self.density[j] != 0.0 {
                s += self.density[j] * w / (z - self.xs[j]);
            }
        }
        s + self.atoms.cauchy(z)
    }

    /// Moments of order `0..=n` including tails.
    pub fn moments(&self, n: usize) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(n + 1);
        let lo = self.xs[0];
        let hi = self.xs[self.xs.len() - 1];
        for k in 0..=n {
            let ys: Vec<f64> = self.xs.iter().zip(&self.density).map(|(x, d)| d * x.powi(k as i32)).collect();
            let mut m = crate::quad::trapezoid(&self.xs, &ys);
            m += self.atoms.atoms().iter().map(|&(x, w)| w * x.powi(k as i32)).sum::<f64>();
            if let Some(t) = self.left_tail {
                let v = t.abs_moment_beyond(-lo, k).ok_or(Error::DivergentMoment(k))?;
                m += if k % 2 == 0 { v } else { -v };
            }
            if let Some(t) = self.right_tail {
                m += t.abs_moment_beyond(hi, k).ok_or(Error::DivergentMoment(k))?;
            }
            out.push(m);
        }
        Ok(out)
    }
}

/// Closed-form families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    Dirac { a: f64 },
    /// Reciprocal Cauchy transform `sqrt(z^2 - 2t)`.
    Arcsine { t: f64 },
    /// `c + sqrt((z - c)^2 - 2t)`.
    DeformedArcsine { t: f64, c: f64 },
    /// Flow of the field `λ z / (1 - z)` for time `t`.
    MonotonePoisson { lambda: f64, t: f64 },
    /// `c + ((z - c)^α + b t)^(1/α)`.
    Stable { alpha: f64, b: C64, c: C64, t: f64 },
}

impl Family {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Family::Dirac { a } => a.is_finite(),
            Family::Arcsine { t } => t.is_finite() && t > 0.0,
            Family::DeformedArcsine { t, c } => t.is_finite() && t > 0.0 && c.is_finite(),
            Family::MonotonePoisson { lambda, t } => lambda.is_finite() && lambda > 0.0 && t.is_finite() && t >= 0.0,
            Family::Stable { alpha, b, c, t } => {
                if !(t.is_finite() && t >= 0.0) {
                    false
                } else {
                    return crate::stable::stable_valid(alpha, b, c).then_some(()).ok_or_else(|| {
                        Error::InvalidMeasure(format!("stable parameters (α={alpha}, b={b}, c={c}) are not admissible"))
                    });
                }
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidMeasure(format!("invalid family parameters {self:?}")))
        }
    }
}

/// Any supported probability or finite measure.
#[derive(Debug, Clone, PartialEq)]
pub enum Measure {
    Atomic(AtomicMeasure),
    Grid(GridMeasure),
    Family(Family),
}

impl From<AtomicMeasure> for Measure {
    fn from(m: AtomicMeasure) -> Self {
        Measure::Atomic(m)
    }
}

impl From<GridMeasure> for Measure {
    fn from(m: GridMeasure) -> Self {
        Measure::Grid(m)
    }
}

impl From<Family> for Measure {
    fn from(m: Family) -> Self {
        Measure::Family(m)
    }
}

impl Measure {
    pub fn dirac(a: f64) -> Self {
        Measure::Atomic(AtomicMeasure::dirac(a))
    }

    /// Total mass; families are probability measures.
    pub fn total_mass(&self) -> f64 {
        match self {
            Measure::Atomic(a) => a.mass(),
            Measure::Grid(g) => g.total_mass(),
            Measure::Family(_) => 1.0,
        }
    }

    /// Cauchy transform where it can be computed directly.
    pub fn cauchy(&self, z: C64) -> Result<C64> {
        match self {
            Measure::Atomic(a) => Ok(a.cauchy(z)),
            Measure::Grid(g) => Ok(g.cauchy(z)),
            Measure::Family(f) => Ok(C64::new(1.0, 0.0) / crate::transform::family_h(f, z)?),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Measure::Family(f) => f.validate(),
            _ => Ok(()),
        }
    }

    /// True when the measure is a single point mass.
    pub fn as_dirac(&self) -> Option<f64> {
        match self {
            Measure::Atomic(a) if a.len() == 1 => Some(a.atoms()[0].0),
            Measure::Family(Family::Dirac { a }) => Some(*a),
            _ => None,
        }
    }
}

/// Image of a measure under `x ↦ λ x`, `λ > 0`.
pub fn dilate(m: &Measure, lambda: f64) -> Result<Measure> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(invalid("dilation factor must be positive"));
    }
    Ok(match m {
        Measure::Atomic(a) => {
            Measure::Atomic(AtomicMeasure::new(a.atoms().iter().map(|&(x, w)| (x * lambda, w)).collect())?)
        }
        Measure::Grid(g) => {
            let xs = g.xs.iter().map(|x| x * lambda).collect();
            let d = g.density.iter().map(|d| d / lambda).collect();
            let atoms = AtomicMeasure::new(g.atoms.atoms().iter().map(|&(x, w)| (x * lambda, w)).collect())?;
            let scale_tail = |t: Tail| Tail { coef: t.coef * lambda.powf(t.exponent - 1.0), exponent: t.exponent };
            let mut out = GridMeasure::new(xs, d, atoms)?.with_tails(g.left_tail.map(scale_tail), g.right_tail.map(scale_tail));
            out.probability = g.probability;
            Measure::Grid(out)
        }
        Measure::Family(f) => match *f {
            Family::Dirac { a } => Measure::Family(Family::Dirac { a: a * lambda }),
            Family::Arcsine { t } => Measure::Family(Family::Arcsine { t: t * lambda * lambda }),
            Family::DeformedArcsine { t, c } => {
                Measure::Family(Family::DeformedArcsine { t: t * lambda * lambda, c: c * lambda })
            }
            Family::Stable { alpha, b, c, t } => {
                Measure::Family(Family::Stable { alpha, b, c: c * lambda, t: t * lambda.powf(alpha) })
            }
            Family::MonotonePoisson { .. } => {
                let g = crate::transform::sample_family(f, 1200)?;
                return dilate(&Measure::Grid(g), lambda);
            }
        },
    })
}
