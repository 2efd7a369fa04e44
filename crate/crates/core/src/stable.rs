//! Strictly stable semigroups `H_t(z) = c + ((z - c)^α + b t)^(1/α)`.

use crate::branch::{arg_principal, pow, pow_checked};
use crate::field::Field;
use crate::invert::{stieltjes_invert, InversionOptions};
use crate::measure::{AtomicMeasure, GridMeasure, Tail};
use crate::transform::{Provenance, TransformEvaluator};
use crate::{Error, Result, C64};
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

const ARG_TOL: f64 = 1e-12;

/// Admissibility of `(α, b, c)`.
pub fn stable_valid(alpha: f64, b: C64, c: C64) -> bool {
    if !(alpha > 0.0 && alpha <= 2.0) || !b.re.is_finite() || !b.im.is_finite() || !c.re.is_finite() || !c.im.is_finite() {
        return false;
    }
    if alpha != 1.0 && c.im > 0.0 {
        return false;
    }
    if b.norm() == 0.0 {
        return true;
    }
    let th = arg_principal(b);
    if alpha <= 1.0 {
        th >= -ARG_TOL && th <= alpha * PI + ARG_TOL
    } else {
        th >= (alpha - 1.0) * PI - ARG_TOL && th <= PI + ARG_TOL
    }
}

/// `H_t(z)` for the stable semigroup; branch `arg ∈ (0, 2π)` throughout.
pub fn stable_h(alpha: f64, b: C64, c: C64, t: f64, z: C64) -> Result<C64> {
    if t == 0.0 {
        return Ok(z);
    }
    let uhp = z.im > 0.0;
    let w = pow_checked(z - c, alpha, uhp)?;
    let inner = w + b * t;
    Ok(c + pow_checked(inner, 1.0 / alpha, uhp)?)
}

/// The generating field `A(z) = (b/α)(z - c)^(1-α)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableField {
    pub alpha: f64,
    pub b: C64,
    pub c: C64,
}

impl StableField {
    pub fn new(alpha: f64, b: C64, c: C64) -> Result<Self> {
        if !stable_valid(alpha, b, c) {
            return Err(Error::InvalidArgument(alloc::format!("inadmissible stable parameters α={alpha}, b={b}, c={c}")));
        }
        Ok(StableField { alpha, b, c })
    }

    fn sides(&self) -> (bool, bool) {
        let right = (self.b.im / self.alpha).abs() > 1e-15;
        let rot = C64::from_polar(1.0, PI * (1.0 - self.alpha));
        let left = ((self.b * rot).im / self.alpha).abs() > 1e-15;
        (left, right)
    }
}

impl Field for StableField {
    fn eval(&self, z: C64) -> Result<C64> {
        let w = z - self.c;
        if w.norm() == 0.0 && self.alpha > 1.0 {
            return Err(Error::PoleAt(self.c.re));
        }
        Ok(self.b / self.alpha * pow(w, 1.0 - self.alpha))
    }

    fn deriv(&self, z: C64) -> Result<C64> {
        let a = self.alpha;
        Ok(self.b * (1.0 - a) / a * pow(z - self.c, -a))
    }

    fn lower(&self) -> f64 {
        if self.b.norm() == 0.0 {
            return f64::INFINITY;
        }
        if self.c.im < 0.0 {
            return f64::NEG_INFINITY;
        }
        if self.alpha == 2.0 {
            return self.c.re;
        }
        if self.alpha == 1.0 {
            return if self.b.im > 0.0 { f64::NEG_INFINITY } else { f64::INFINITY };
        }
        match self.sides() {
            (true, _) => f64::NEG_INFINITY,
            (false, true) => self.c.re,
            _ => f64::INFINITY,
        }
    }

    fn upper(&self) -> f64 {
        if self.b.norm() == 0.0 {
            return f64::NEG_INFINITY;
        }
        if self.c.im < 0.0 {
            return f64::INFINITY;
        }
        if self.alpha == 2.0 {
            return self.c.re;
        }
        if self.alpha == 1.0 {
            return if self.b.im > 0.0 { f64::INFINITY } else { f64::NEG_INFINITY };
        }
        match self.sides() {
            (_, true) => f64::INFINITY,
            (true, false) => self.c.re,
            _ => f64::NEG_INFINITY,
        }
    }

    fn limit_minus_infinity(&self) -> f64 {
        let a = self.alpha;
        if a > 1.0 {
            return 0.0;
        }
        let v = self.b / a * C64::from_polar(1.0, PI * (1.0 - a));
        if a == 1.0 {
            return v.re;
        }
        if v.re == 0.0 {
            0.0
        } else {
            v.re.signum() * f64::INFINITY
        }
    }
}

/// Time rescaling `k` with `b = k b_norm`, where `b_norm` is `1` for
/// `α < 1` and `-1` otherwise; `None` if `b` is not a positive multiple.
fn normalisation(alpha: f64, b: C64) -> Option<f64> {
    if b.im.abs() > 1e-14 * (1.0 + b.re.abs()) {
        return None;
    }
    let k = if alpha < 1.0 { b.re } else { -b.re };
    (k > 0.0).then_some(k)
}

/// Support of the continuous part and the atom, if any.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportCase {
    /// Row 1 to 8 of the case table; 0 for `t = 0`.
    pub case_id: u8,
    pub ac_support: Option<(f64, f64)>,
    pub atom: Option<(f64, f64)>,
}

impl SupportCase {
    pub fn atom_weight(&self) -> f64 {
        self.atom.map_or(0.0, |a| a.1)
    }
}

/// Support case for normalised parameters (`b = 1` for `α < 1`, `b = -1`
/// for `1 ≤ α ≤ 2`).
pub fn stable_support_case(alpha: f64, b: C64, c: C64, t: f64) -> Result<SupportCase> {
    if !stable_valid(alpha, b, c) || t < 0.0 {
        return Err(Error::InvalidArgument("inadmissible stable parameters".into()));
    }
    if normalisation(alpha, b).map_or(true, |k| (k - 1.0).abs() > 1e-14) {
        return Err(Error::UnnormalizedB);
    }
    Ok(case_table(alpha, c, t))
}

fn case_table(alpha: f64, c: C64, t: f64) -> SupportCase {
    let inf = f64::INFINITY;
    if t == 0.0 {
        return SupportCase { case_id: 0, ac_support: None, atom: Some((0.0, 1.0)) };
    }
    if alpha == 1.0 {
        // H_t(z) = z - t
        return SupportCase { case_id: 8, ac_support: None, atom: Some((t, 1.0)) };
    }
    if c.im < 0.0 {
        return SupportCase { case_id: 1, ac_support: Some((-inf, inf)), atom: None };
    }
    let c = c.re;
    let ca = c.abs().powf(alpha);
    if alpha == 2.0 {
        let r = t.sqrt();
        let s = (c * c + t).sqrt();
        let ac = Some((c - r, c + r));
        return if c >= 0.0 {
            SupportCase { case_id: 2, ac_support: ac, atom: (c > 0.0).then(|| (c - s, c / s)) }
        } else {
            SupportCase { case_id: 3, ac_support: ac, atom: Some((c + s, -c / s)) }
        };
    }
    if alpha > 1.0 {
        let ac = Some((-inf, c + t.powf(1.0 / alpha)));
        return if c >= 0.0 {
            SupportCase { case_id: 4, ac_support: ac, atom: None }
        } else {
            let pos = c + (ca + t).powf(1.0 / alpha);
            let w = (ca / (ca + t)).powf((alpha - 1.0) / alpha);
            SupportCase { case_id: 5, ac_support: ac, atom: Some((pos, w)) }
        };
    }
    let ac = Some((-inf, c));
    if c >= 0.0 {
        return SupportCase { case_id: 6, ac_support: ac, atom: None };
    }
    let atom = (t < ca).then(|| {
        let pos = c + (ca - t).powf(1.0 / alpha);
        let w = ((ca - t) / ca).powf((1.0 - alpha) / alpha);
        (pos, w)
    });
    SupportCase { case_id: 7, ac_support: ac, atom }
}

/// Hull of the support for any admissible parameters.
pub fn stable_hull(alpha: f64, b: C64, c: C64, t: f64) -> (f64, f64) {
    let inf = f64::INFINITY;
    if t == 0.0 {
        return (0.0, 0.0);
    }
    if alpha == 1.0 {
        if b.im.abs() > 0.0 {
            return (-inf, inf);
        }
        return (-b.re * t, -b.re * t);
    }
    let Some(k) = normalisation(alpha, b) else {
        return (-inf, inf);
    };
    let sc = case_table(alpha, c, k * t);
    let (mut lo, mut hi) = sc.ac_support.unwrap_or((inf, -inf));
    if let Some((x, _)) = sc.atom {
        lo = lo.min(x);
        hi = hi.max(x);
    }
    (lo, hi)
}

/// Sampled stable law and whether the density came from a closed form.
#[derive(Debug, Clone)]
pub struct StableDensity {
    pub measure: GridMeasure,
    pub closed_form: bool,
}

/// Density of `μ_t` on `xs` plus its atom. `α = 2` and `α = 1/2` with
/// normalised `b` and real `c` use explicit formulas; other cases invert.
pub fn stable_density(alpha: f64, b: C64, c: C64, t: f64, xs: &[f64]) -> Result<StableDensity> {
    if !stable_valid(alpha, b, c) {
        return Err(Error::InvalidArgument("inadmissible stable parameters".into()));
    }
    let normalised = normalisation(alpha, b).map_or(false, |k| (k - 1.0).abs() < 1e-14);
    if normalised && c.im == 0.0 && t > 0.0 && (alpha == 2.0 || alpha == 0.5) {
        let cr = c.re;
        let sc = case_table(alpha, c, t);
        let density: Vec<f64> = xs
            .iter()
            .map(|&x| {
                let d = x - cr;
                if alpha == 2.0 {
                    let q = t - d * d;
                    if q > 0.0 {
                        q.sqrt() / (PI * (cr * cr + q))
                    } else {
                        0.0
                    }
                } else if x < cr {
                    let u = cr - x;
                    2.0 * t * u.sqrt() / (PI * ((t * t + x) * (t * t + x) + 4.0 * t * t * u))
                } else {
                    0.0
                }
            })
            .collect();
        let atoms = AtomicMeasure::new(sc.atom.into_iter().collect())?;
        let mut g = GridMeasure::new(xs.to_vec(), density, atoms)?;
        if alpha == 0.5 && xs[0] < 0.0 {
            g.left_tail = Some(Tail { coef: 2.0 * t / PI, exponent: 1.5 });
        }
        return Ok(StableDensity { measure: g, closed_form: true });
    }
    let h = TransformEvaluator::new(move |z| stable_h(alpha, b, c, t, z), Provenance::ClosedForm);
    let mut opts = InversionOptions::default();
    if let Some(k) = normalisation(alpha, b) {
        if c.im <= 0.0 {
            if let Some((x, _)) = case_table(alpha, c, k * t).atom {
                opts.atom_hints.push(x);
            }
        }
    }
    Ok(StableDensity { measure: stieltjes_invert(&h, xs, &opts)?, closed_form: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Reflected;
    use crate::semigroup::{atom_track, support_edge, CaseLabel};

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn validity() {
        assert!(stable_valid(2.0, re(-1.0), re(0.0)));
        assert!(stable_valid(0.5, re(1.0), re(-1.0)));
        assert!(!stable_valid(3.0, re(-1.0), re(0.0)));
        assert!(!stable_valid(0.5, re(-1.0), re(0.0)));
        assert!(!stable_valid(2.0, re(-1.0), C64::new(0.0, 1.0)));
        assert!(stable_valid(1.0, C64::new(0.0, 1.0), C64::new(0.0, 1.0)));
    }

    #[test]
    fn quadratic_case_value() {
        let h = stable_h(2.0, re(-1.0), re(0.0), 1.0, C64::new(0.0, 2.0)).unwrap();
        assert!((h - C64::new(0.0, 5f64.sqrt())).norm() < 1e-14);
    }

    #[test]
    fn table_rows() {
        let s = stable_support_case(2.0, re(-1.0), re(1.0), 1.0).unwrap();
        assert_eq!(s.case_id, 2);
        assert_eq!(s.ac_support, Some((0.0, 2.0)));
        let (x, w) = s.atom.unwrap();
        assert!((x - (1.0 - 2f64.sqrt())).abs() < 1e-15 && (w - 0.5f64.sqrt()).abs() < 1e-15);
        let s = stable_support_case(0.5, re(1.0), re(-1.0), 0.5).unwrap();
        assert_eq!(s.case_id, 7);
        let (x, w) = s.atom.unwrap();
        assert!((x + 0.75).abs() < 1e-15 && (w - 0.5).abs() < 1e-15);
        let s = stable_support_case(1.0, re(-1.0), re(2.0), 3.0).unwrap();
        assert_eq!((s.case_id, s.atom), (8, Some((3.0, 1.0))));
        assert_eq!(stable_support_case(2.0, re(-2.0), re(0.0), 1.0), Err(Error::UnnormalizedB));
        let s = stable_support_case(0.5, re(1.0), re(-1.0), 1.0).unwrap();
        assert!(s.atom_weight().abs() < 1e-8);
    }

    #[test]
    fn closed_densities() {
        let d = stable_density(2.0, re(-1.0), re(0.0), 1.0, &[-0.5, 0.0, 0.5]).unwrap();
        assert!(d.closed_form);
        assert!((d.measure.density[1] - 1.0 / PI).abs() < 1e-15);
        let d = stable_density(0.5, re(1.0), re(0.0), 1.0, &[-1.0, -0.5]).unwrap();
        assert!((d.measure.density[0] - 0.5 / PI).abs() < 1e-15);
    }

    #[test]
    fn field_matches_time_derivative() {
        let (a, b, c) = (1.5, re(-1.0), re(0.3));
        let f = StableField::new(a, b, c).unwrap();
        let z = C64::new(0.4, 0.9);
        for &t in &[0.2, 0.7, 1.3] {
            let h = 1e-5;
            let d = (stable_h(a, b, c, t + h, z).unwrap() - stable_h(a, b, c, t - h, z).unwrap()) / (2.0 * h);
            let v = f.eval(stable_h(a, b, c, t, z).unwrap()).unwrap();
            assert!((d - v).norm() < 1e-6);
        }
    }

    #[test]
    fn atom_dies_at_one() {
        let f = StableField::new(0.5, re(1.0), re(-1.0)).unwrap();
        let tr = atom_track(&Reflected(&f), 1.0, 20).unwrap();
        assert_eq!(tr.case, CaseLabel::D);
        assert!((tr.death_time.unwrap() - 1.0).abs() < 1e-6);
        for ((t, th), w) in tr.times.iter().zip(&tr.position).zip(&tr.weight) {
            assert!((-th - (-1.0 + (1.0 - t) * (1.0 - t))).abs() < 1e-6, "t={t} th={th}");
            assert!((w - (1.0 - t)).abs() < 1e-6);
        }
    }

    #[test]
    fn upper_edge_heavy_left() {
        let f = StableField::new(1.5, re(-1.0), re(0.0)).unwrap();
        let e = support_edge(&Reflected(&f), 2.0, 10).unwrap();
        for (t, x) in e.times.iter().zip(&e.edge) {
            assert!((-x - t.powf(2.0 / 3.0)).abs() < 1e-6, "t={t} x={x}");
        }
    }
}
