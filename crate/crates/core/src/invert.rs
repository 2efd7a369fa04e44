//! Recovering a measure from its reciprocal Cauchy transform.

use crate::grid::geometric_desc;
use crate::measure::{AtomicMeasure, GridMeasure, GRID_PROB_TOL};
use crate::transform::TransformEvaluator;
use crate::{Error, Result, C64};
use alloc::vec::Vec;
use core::f64::consts::PI;

/// Knobs for [`stieltjes_invert`].
#[derive(Debug, Clone)]
pub struct InversionOptions {
    /// Decreasing heights above the axis used for extrapolation.
    pub eps: Vec<f64>,
    /// Heights used for atom weights.
    pub y_schedule: Vec<f64>,
    /// Extra atom candidates.
    pub atom_hints: Vec<f64>,
    /// Atoms lighter than this are dropped.
    pub atom_threshold: f64,
    pub detect_atoms: bool,
    /// Relative disagreement above which a grid point counts as unstable.
    pub stability_tol: f64,
    /// Fraction of unstable points that triggers `GridTooCoarse`.
    pub max_unstable_fraction: f64,
}

impl Default for InversionOptions {
    fn default() -> Self {
        InversionOptions {
            eps: geometric_desc(1e-2, 1e-7, 11),
            y_schedule: geometric_desc(1e-2, 1e-7, 11),
            atom_hints: Vec::new(),
            atom_threshold: 1e-5,
            detect_atoms: true,
            stability_tol: 1e-2,
            max_unstable_fraction: 0.01,
        }
    }
}

/// Inversion output with diagnostics.
#[derive(Debug, Clone)]
pub struct InversionReport {
    pub measure: GridMeasure,
    /// Grid indices whose extrapolation did not settle.
    pub unstable: Vec<usize>,
    /// Points where `|G|` grows like `1/ε` but no atom was accepted.
    pub blowups: Vec<f64>,
}

/// Pick the most self-consistent Richardson estimate from values taken at
/// decreasing heights. Returns the estimate and its disagreement.
pub(crate) fn richardson(hs: &[f64], vs: &[f64]) -> Option<(f64, f64)> {
    let mut est: Vec<f64> = Vec::with_capacity(vs.len());
    for k in 0..vs.len().saturating_sub(1) {
        let (a, b) = (vs[k], vs[k + 1]);
        if !a.is_finite() || !b.is_finite() {
            est.push(f64::NAN);
            continue;
        }
        let r = hs[k + 1] / hs[k];
        est.push((b - r * a) / (1.0 - r));
    }
    if est.is_empty() {
        return vs.iter().rev().find(|v| v.is_finite()).map(|&v| (v, f64::INFINITY));
    }
    if est.len() == 1 {
        return est[0].is_finite().then_some((est[0], f64::INFINITY));
    }
    let mut best: Option<(f64, f64)> = None;
    for k in 1..est.len() {
        let d = (est[k] - est[k - 1]).abs();
        if !d.is_finite() {
            continue;
        }
        if best.map_or(true, |(_, bd)| d <= bd) {
            best = Some((est[k], d));
        }
    }
    best
}

/// Weight of a possible atom at `a`, from `Re(iy / H(a + iy))` as `y → 0`.
/// Values below `1e-5` are reported as zero.
pub fn atom_weight_at(h: &TransformEvaluator, a: f64, ys: &[f64]) -> f64 {
    let vs: Vec<f64> = ys
        .iter()
        .map(|&y| match h.eval(C64::new(a, y)) {
            Ok(v) if v.norm() > 0.0 => (C64::new(0.0, y) / v).re,
            _ => f64::NAN,
        })
        .collect();
    match richardson(ys, &vs) {
        Some((w, _)) if w >= 1e-5 => w.min(1.0 + 1e-9),
        _ => 0.0,
    }
}

fn refine_zero(h: &TransformEvaluator, lo: f64, hi: f64) -> Option<f64> {
    let f = |x: f64| {
        let e = 1e-13 * (1.0 + x.abs());
        h.eval(C64::new(x, e)).map(|v| v.re).unwrap_or(f64::NAN)
    };
    let (fl, fh) = (f(lo), f(hi));
    if !fl.is_finite() || !fh.is_finite() {
        return None;
    }
    if fl == 0.0 {
        return Some(lo);
    }
    if fh == 0.0 {
        return Some(hi);
    }
    if (fl > 0.0) == (fh > 0.0) {
        return None;
    }
    Some(crate::roots::bisect(f, lo, hi, fl.signum()))
}

/// Locate atoms from sign changes of `Re H` just above the grid and from hints.
pub fn detect_atoms(h: &TransformEvaluator, xs: &[f64], opts: &InversionOptions) -> AtomicMeasure {
    let e = *opts.eps.last().unwrap_or(&1e-7);
    let re: Vec<f64> = xs.iter().map(|&x| h.eval(C64::new(x, e)).map(|v| v.re).unwrap_or(f64::NAN)).collect();
    let mut cands: Vec<f64> = Vec::new();
    for j in 1..xs.len() {
        let (a, b) = (re[j - 1], re[j]);
        if a.is_finite() && b.is_finite() && (a == 0.0 || (a > 0.0) != (b > 0.0)) {
            if let Some(z) = refine_zero(h, xs[j - 1], xs[j]) {
                cands.push(z);
            }
        }
    }
    for &hint in &opts.atom_hints {
        let d = 1e-6 * (1.0 + hint.abs());
        cands.push(refine_zero(h, hint - d, hint + d).unwrap_or(hint));
    }
    cands.sort_by(|a, b| a.total_cmp(b));
    cands.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * (1.0 + a.abs()));
    let atoms = cands
        .into_iter()
        .map(|a| (a, atom_weight_at(h, a, &opts.y_schedule)))
        .filter(|&(_, w)| w >= opts.atom_threshold)
        .collect();
    AtomicMeasure::new(atoms).unwrap_or_default()
}

/// Density on `xs` and atoms of the measure whose reciprocal transform is `h`.
pub fn stieltjes_invert(h: &TransformEvaluator, xs: &[f64], opts: &InversionOptions) -> Result<GridMeasure> {
    stieltjes_invert_report(h, xs, opts).map(|r| r.measure)
}

/// As [`stieltjes_invert`], keeping diagnostics.
pub fn stieltjes_invert_report(h: &TransformEvaluator, xs: &[f64], opts: &InversionOptions) -> Result<InversionReport> {
    if xs.len() < 2 || !xs.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidArgument("grid must be strictly increasing with >= 2 points".into()));
    }
    let atoms = if opts.detect_atoms { detect_atoms(h, xs, opts) } else { AtomicMeasure::empty() };
    let mut density = Vec::with_capacity(xs.len());
    let mut unstable = Vec::new();
    let mut blowups = Vec::new();
    for (j, &x) in xs.iter().enumerate() {
        let mut vs = Vec::with_capacity(opts.eps.len());
        for &e in &opts.eps {
            let z = C64::new(x, e);
            let v = match h.eval(z) {
                Ok(hv) if hv.norm() > 0.0 => {
                    let mut g = hv.inv();
                    for &(a, w) in atoms.atoms() {
                        g -= w / (z - a);
                    }
                    -g.im / PI
                }
                _ => f64::NAN,
            };
            vs.push(v);
        }
        let (d, spread) = richardson(&opts.eps, &vs).unwrap_or((f64::NAN, f64::INFINITY));
        if !d.is_finite() || spread > opts.stability_tol * (1.0 + d.abs()) {
            unstable.push(j);
        }
        if let (Some(&v0), Some(&e0)) = (vs.last(), opts.eps.last()) {
            if v0.is_finite() && v0 * e0 * PI > 1e-3 && d.abs() * e0 * PI < 1e-4 * v0 * e0 * PI {
                blowups.push(x);
            }
        }
        density.push(if d.is_finite() { d.max(0.0) } else { 0.0 });
    }
    if unstable.len() as f64 > opts.max_unstable_fraction * xs.len() as f64 {
        return Err(Error::GridTooCoarse { bad: unstable.len(), total: xs.len() });
    }
    let mut g = GridMeasure::new(xs.to_vec(), density, atoms)?;
    g.probability = (g.total_mass() - 1.0).abs() <= GRID_PROB_TOL;
    Ok(InversionReport { measure: g, unstable, blowups })
}
