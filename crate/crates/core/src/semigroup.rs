//! Flows of vector fields, atom and support-edge tracking, and the
//! time-independent checks on a Lévy pair.

use crate::field::{Field, VectorField};
use crate::invert::{atom_weight_at, InversionOptions};
use crate::measure::{AtomicMeasure, GridMeasure, Measure, GRID_PROB_TOL};
use crate::ode::{solve, OdeOptions};
use crate::transform::{Provenance, TransformEvaluator};
use crate::{Error, Result, C64};
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

/// Integrator settings for flows.
pub type FlowOptions = OdeOptions;

/// `H_t(z0)`: solution of `dH/dt = A(H)`, `H_0 = z0`.
pub fn flow<F: Field + ?Sized>(f: &F, z0: C64, t: f64, opts: &FlowOptions) -> Result<C64> {
    if t < 0.0 || !t.is_finite() {
        return Err(Error::InvalidArgument("flow time must be finite and non-negative".into()));
    }
    if t == 0.0 {
        return Ok(z0);
    }
    Ok(solve(|z| f.eval(z), z0, 0.0, &[t], opts, |_| true)?[0])
}

/// `H_t(z0)` at each of the increasing `times`.
pub fn flow_times<F: Field + ?Sized>(f: &F, z0: C64, times: &[f64], opts: &FlowOptions) -> Result<Vec<C64>> {
    solve(|z| f.eval(z), z0, 0.0, times, opts, |_| true)
}

/// The flow at time `t` as a transform evaluator.
pub fn flow_evaluator<'a, F: Field + ?Sized + Sync>(f: &'a F, t: f64, opts: FlowOptions) -> TransformEvaluator<'a> {
    TransformEvaluator::new(move |z| flow(f, z, t, &opts), Provenance::Flow)
}

/// Sign pattern of `A` on the real half-line left of the Lévy measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseLabel {
    /// `A > 0` on `(-∞, 0)`.
    A,
    /// `A(u0) = 0` for some `u0 < 0`.
    APrime,
    /// `A(0) = 0`.
    B,
    /// `A(u0) = 0` for some `0 < u0 < a(τ)`.
    C,
    /// `A < 0` on `(-∞, a(τ))`.
    D,
    /// Edge case: `A > 0` on `(-∞, a(τ))`.
    EdgeA,
    /// Edge case: a zero `u0 < a(τ)`.
    EdgeB,
    /// Edge case: `A < 0` on `(-∞, a(τ))`.
    EdgeC,
}

impl CaseLabel {
    pub fn name(self) -> &'static str {
        match self {
            CaseLabel::A => "A",
            CaseLabel::APrime => "A'",
            CaseLabel::B => "B",
            CaseLabel::C => "C",
            CaseLabel::D => "D",
            CaseLabel::EdgeA => "a",
            CaseLabel::EdgeB => "b",
            CaseLabel::EdgeC => "c",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    pub label: CaseLabel,
    /// The zero of `A` when one exists.
    pub zero: Option<f64>,
    /// Set when `A` tends to zero at `a(τ)`, where the theory is silent.
    pub low_confidence: bool,
}

fn lower_checked<F: Field + ?Sized>(f: &F) -> Result<f64> {
    let a = f.lower();
    if !a.is_finite() {
        return Err(Error::UnboundedBelowTau);
    }
    Ok(a)
}

fn a_near_edge<F: Field + ?Sized>(f: &F, a: f64) -> f64 {
    let mut d = 1e-12 * (1.0 + a.abs());
    for _ in 0..6 {
        if let Ok(v) = f.eval_real(a - d) {
            return v;
        }
        d *= 100.0;
    }
    f64::NAN
}

fn zero_left_of<F: Field + ?Sized>(f: &F, right: f64) -> Option<f64> {
    let g = |u: f64| f.eval_real(u).unwrap_or(f64::NAN);
    let s = g(right);
    let left = crate::roots::expand(g, right, -1.0, s, 1.0)?;
    Some(crate::roots::bisect(g, left, right, -s))
}

/// Classify a field by the behaviour of `A` on `(-∞, a(τ))`. When
/// `a(τ) > 0` the atom cases are returned, otherwise the edge cases.
pub fn classify_field<F: Field + ?Sized>(f: &F) -> Result<Classification> {
    let a = lower_checked(f)?;
    if a > 0.0 {
        classify_atom(f, a)
    } else {
        classify_edge(f)
    }
}

fn classify_atom<F: Field + ?Sized>(f: &F, a: f64) -> Result<Classification> {
    let a0 = f.eval_real(0.0)?;
    let scale = 1.0 + f.deriv(C64::new(0.0, 0.0)).map(|d| d.norm()).unwrap_or(0.0);
    if a0.abs() <= 1e-12 * scale {
        return Ok(Classification { label: CaseLabel::B, zero: Some(0.0), low_confidence: false });
    }
    if a0 > 0.0 {
        if f.limit_minus_infinity() >= 0.0 {
            return Ok(Classification { label: CaseLabel::A, zero: None, low_confidence: false });
        }
        let u0 = zero_left_of(f, 0.0);
        return Ok(Classification { label: CaseLabel::APrime, zero: u0, low_confidence: false });
    }
    let edge = a_near_edge(f, a);
    if edge > 0.0 {
        let g = |u: f64| f.eval_real(u).unwrap_or(f64::NAN);
        let hi = a - 1e-12 * (1.0 + a.abs());
        let u0 = crate::roots::bisect(g, 0.0, hi, -1.0);
        return Ok(Classification { label: CaseLabel::C, zero: Some(u0), low_confidence: false });
    }
    Ok(Classification { label: CaseLabel::D, zero: None, low_confidence: edge.abs() < 1e-8 })
}

/// Edge cases (a)-(c), valid whenever `a(τ) > -∞`.
pub fn classify_edge<F: Field + ?Sized>(f: &F) -> Result<Classification> {
    let a = lower_checked(f)?;
    if f.limit_minus_infinity() >= 0.0 {
        return Ok(Classification { label: CaseLabel::EdgeA, zero: None, low_confidence: false });
    }
    let edge = a_near_edge(f, a);
    if edge > 0.0 {
        let u0 = zero_left_of(f, a - 1e-12 * (1.0 + a.abs()));
        return Ok(Classification { label: CaseLabel::EdgeB, zero: u0, low_confidence: false });
    }
    Ok(Classification { label: CaseLabel::EdgeC, zero: None, low_confidence: edge.abs() < 1e-8 })
}

fn sample_times(t_end: f64, steps: usize) -> Vec<f64> {
    let n = steps.max(1);
    (0..=n).map(|k| t_end * k as f64 / n as f64).collect()
}

/// Position and weight of the atom born at `0`.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomTrack {
    pub times: Vec<f64>,
    pub position: Vec<f64>,
    pub weight: Vec<f64>,
    pub case: CaseLabel,
    /// Time at which the atom reaches `a(τ)` and vanishes (case D).
    pub death_time: Option<f64>,
    pub low_confidence: bool,
}

/// `∫_θ^{a} du / (-A(u))` with `θ = a - smax²`, through the substitution `u = a - s²`.
fn time_to_edge<F: Field + ?Sized>(f: &F, a: f64, smax: f64, sign: f64) -> Option<f64> {
    // below this `a - s²` is not resolved in floating point; the integrand is
    // held at its value there
    let s_floor = 1e-6 * a.abs().max(1e-300).sqrt();
    let r = crate::quad::integrate(
        |s| {
            let s = s.max(s_floor);
            let v = f.eval_real(a - s * s).unwrap_or(f64::NAN);
            2.0 * s / (sign * v)
        },
        0.0,
        smax,
        1e-13,
    );
    // rounding in `a - s²` keeps the error estimate from reaching `tol`
    (r.value.is_finite() && r.error <= 1e-9 * (1.0 + r.value.abs())).then_some(r.value)
}

/// Solve `θ' = -A(θ)`, `θ(0) = 0` on `[0, t_end]` and report the weight of
/// the atom sitting at `θ(t)`.
pub fn atom_track<F: Field + ?Sized>(f: &F, t_end: f64, steps: usize) -> Result<AtomTrack> {
    let cls = classify_field(f)?;
    let a = f.lower();
    if a <= 0.0 {
        return Err(Error::CaseMismatch);
    }
    let times = sample_times(t_end, steps);
    let mut out = AtomTrack {
        times: times.clone(),
        position: Vec::new(),
        weight: Vec::new(),
        case: cls.label,
        death_time: None,
        low_confidence: cls.low_confidence,
    };
    if cls.label == CaseLabel::B {
        let d = f.deriv(C64::new(0.0, 0.0))?.re;
        out.position = alloc::vec![0.0; times.len()];
        out.weight = times.iter().map(|t| (-d * t).exp()).collect();
        return Ok(out);
    }
    let a0 = f.eval_real(0.0)?;
    if cls.label == CaseLabel::D {
        // θ increases to a(τ); parametrise time by position to pass the edge.
        let t0 = time_to_edge(f, a, a.sqrt(), -1.0);
        out.death_time = t0;
        if t0.is_none() {
            out.low_confidence = true;
        }
        let total = t0.unwrap_or(f64::INFINITY);
        for &t in &times {
            if t >= total {
                out.position.push(a);
                out.weight.push(0.0);
                continue;
            }
            // remaining time to the edge as a function of s = sqrt(a - θ)
            let remaining = total - t;
            let rem = |s: f64| time_to_edge(f, a, s, -1.0).unwrap_or(f64::INFINITY);
            let s = crate::roots::bisect(|s| rem(s) - remaining, 0.0, a.sqrt(), -1.0);
            let th = a - s * s;
            out.position.push(th);
            out.weight.push((f.eval_real(th)? / a0).clamp(0.0, 1.0));
        }
        return Ok(out);
    }
    let guard_hi = a;
    let ths = solve(
        |th: f64| f.eval_real(th).map(|v| -v),
        0.0,
        0.0,
        &times,
        &OdeOptions::default(),
        |th| th < guard_hi,
    )?;
    for th in ths {
        out.weight.push((f.eval_real(th)? / a0).clamp(0.0, 1.0));
        out.position.push(th);
    }
    Ok(out)
}

/// Left end of the continuous support over time.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeTrack {
    pub times: Vec<f64>,
    pub edge: Vec<f64>,
    pub case: CaseLabel,
    pub low_confidence: bool,
}

/// Solve `E' = -A(E)`, `E(0) = a(τ)`. Time is parametrised by position,
/// `t(E) = ∫_E^{a} du / A(u)`, which stays regular at the start even when
/// `A` has a pole there.
pub fn support_edge<F: Field + ?Sized>(f: &F, t_end: f64, steps: usize) -> Result<EdgeTrack> {
    let cls = classify_edge(f)?;
    let a = f.lower();
    let times = sample_times(t_end, steps);
    if cls.label == CaseLabel::EdgeC {
        return Ok(EdgeTrack { edge: alloc::vec![a; times.len()], times, case: cls.label, low_confidence: cls.low_confidence });
    }
    let elapsed = |s: f64| time_to_edge(f, a, s, 1.0).unwrap_or(f64::INFINITY);
    let s_cap = match cls.zero {
        Some(u0) => (a - u0).sqrt(),
        None => f64::INFINITY,
    };
    let mut edge = Vec::with_capacity(times.len());
    for &t in &times {
        if t == 0.0 {
            edge.push(a);
            continue;
        }
        let mut hi = if s_cap.is_finite() { s_cap } else { 1.0 };
        if !s_cap.is_finite() {
            while elapsed(hi) < t {
                hi *= 2.0;
                if hi > 1e150 {
                    return Err(Error::StepUnderflow { t });
                }
            }
        }
        let s = crate::roots::bisect(|s| elapsed(s) - t, 0.0, hi, -1.0);
        edge.push(a - s * s);
    }
    Ok(EdgeTrack { times, edge, case: cls.label, low_confidence: cls.low_confidence })
}

/// Which of the four positivity conditions failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PositivityFailure {
    NegativeSupport,
    AtomAtZero,
    DivergentInverseMoment,
    DriftTooSmall,
}

impl PositivityFailure {
    pub fn describe(self) -> &'static str {
        match self {
            PositivityFailure::NegativeSupport => "Levy measure charges (-inf, 0)",
            PositivityFailure::AtomAtZero => "Levy measure has an atom at 0",
            PositivityFailure::DivergentInverseMoment => "integral of 1/x against the Levy measure diverges",
            PositivityFailure::DriftTooSmall => "drift is smaller than the integral of 1/x",
        }
    }
}

/// Outcome of a positivity test; `failure` names the first broken condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositivityVerdict {
    pub holds: bool,
    pub failure: Option<PositivityFailure>,
    /// `∫ (1/x) dτ` when finite.
    pub inverse_moment: Option<f64>,
}

const ZERO_ATOM_TOL: f64 = 1e-9;

/// `∫ (1/x) dτ` for `τ` on `[0, ∞)` with no atom at `0`; `None` if divergent.
fn inverse_moment(tau: &Measure) -> Result<Option<f64>> {
    match tau {
        Measure::Atomic(a) => Ok(Some(a.atoms().iter().map(|&(x, w)| w / x).sum())),
        Measure::Grid(g) => {
            if g.right_tail.is_some() && g.right_tail.map_or(false, |t| t.exponent <= 0.0) {
                return Ok(None);
            }
            let mut s = 0.0;
            for j in 1..g.xs.len() {
                let (x0, x1) = (g.xs[j - 1], g.xs[j]);
                let (d0, d1) = (g.density[j - 1], g.density[j]);
                if d0 == 0.0 && d1 == 0.0 {
                    continue;
                }
                // density linear on the panel: ∫ (p + q x)/x dx
                let q = (d1 - d0) / (x1 - x0);
                let p = d0 - q * x0;
                let part = if x0 <= 0.0 {
                    if p.abs() > 0.0 {
                        return Ok(None);
                    }
                    q * (x1 - x0)
                } else {
                    p * (x1 / x0).ln() + q * (x1 - x0)
                };
                if !part.is_finite() || part > 1e6 {
                    return Ok(None);
                }
                s += part;
            }
            s += g.atoms.atoms().iter().map(|&(x, w)| w / x).sum::<f64>();
            if let Some(t) = g.right_tail {
                let hi = g.xs[g.xs.len() - 1];
                s += t.abs_moment_beyond(hi, 0).map(|m| m / hi).unwrap_or(0.0);
            }
            Ok(Some(s))
        }
        Measure::Family(crate::measure::Family::Dirac { a }) => Ok(Some(1.0 / a)),
        Measure::Family(_) => Err(Error::Unsupported("positivity test for a family-valued Levy measure".into())),
    }
}

/// The four conditions `supp τ ⊂ [0,∞)`, `τ({0}) = 0`, `∫ 1/x dτ < ∞` and
/// `γ ≥ ∫ 1/x dτ`, shared by the monotone, boolean and classical checks.
pub fn subordinator_condition(gamma: f64, tau: &Measure) -> Result<PositivityVerdict> {
    let fail = |f| Ok(PositivityVerdict { holds: false, failure: Some(f), inverse_moment: None });
    if tau.total_mass() == 0.0 {
        let holds = gamma >= 0.0;
        return Ok(PositivityVerdict {
            holds,
            failure: (!holds).then_some(PositivityFailure::DriftTooSmall),
            inverse_moment: Some(0.0),
        });
    }
    let (lo, _) = crate::transform::support_bounds(tau)?;
    let atoms: &[(f64, f64)] = match tau {
        Measure::Atomic(a) => a.atoms(),
        Measure::Grid(g) => g.atoms.atoms(),
        _ => &[],
    };
    if atoms.iter().any(|a| a.0.abs() < ZERO_ATOM_TOL) || tau.as_dirac().map_or(false, |a| a.abs() < ZERO_ATOM_TOL) {
        return fail(PositivityFailure::AtomAtZero);
    }
    if lo < -ZERO_ATOM_TOL {
        return fail(PositivityFailure::NegativeSupport);
    }
    let inv = match inverse_moment(tau)? {
        Some(v) => v,
        None => return fail(PositivityFailure::DivergentInverseMoment),
    };
    let holds = gamma >= inv - 1e-12 * (1.0 + inv.abs());
    Ok(PositivityVerdict { holds, failure: (!holds).then_some(PositivityFailure::DriftTooSmall), inverse_moment: Some(inv) })
}

/// Whether every `μ_t` is supported in `[0, ∞)`.
pub fn subordinator_check(v: &VectorField) -> Result<PositivityVerdict> {
    subordinator_condition(v.gamma, &v.tau)
}

/// Whether `a(τ) > -∞` (zero `τ` counts as bounded).
pub fn bounded_below_check(v: &VectorField) -> bool {
    if v.tau.total_mass() == 0.0 {
        return true;
    }
    match crate::transform::support_bounds(&v.tau) {
        Ok((lo, _)) => lo.is_finite(),
        Err(_) => false,
    }
}

/// Cached flow values on a grid, from which every kernel `μ_{t,x}`
/// (reciprocal transform `H_t - x`) is read off without new flows.
pub struct KernelSnapshot<'a, F: Field + ?Sized> {
    field: &'a F,
    t: f64,
    xs: Vec<f64>,
    opts: InversionOptions,
    flow_opts: FlowOptions,
    values: Vec<Vec<C64>>,
    scan_xs: Vec<f64>,
    scan_vals: Vec<f64>,
}

impl<'a, F: Field + ?Sized + Sync> KernelSnapshot<'a, F> {
    /// `scan` lists extra points used only to look for atoms.
    pub fn new(field: &'a F, t: f64, xs: &[f64], scan: &[f64], opts: InversionOptions, flow_opts: FlowOptions) -> Result<Self> {
        if t < 0.0 {
            return Err(Error::InvalidArgument("time must be non-negative".into()));
        }
        let mut values = Vec::with_capacity(xs.len());
        for &x in xs {
            let mut row = Vec::with_capacity(opts.eps.len());
            for &e in &opts.eps {
                row.push(flow(field, C64::new(x, e), t, &flow_opts)?);
            }
            values.push(row);
        }
        let mut scan_xs: Vec<f64> = xs.iter().chain(scan.iter()).cloned().collect();
        scan_xs.sort_by(|a, b| a.total_cmp(b));
        scan_xs.dedup();
        let e = *opts.eps.last().unwrap_or(&1e-7);
        let scan_vals = scan_xs
            .iter()
            .map(|&x| flow(field, C64::new(x, e), t, &flow_opts).map(|v| v.re).unwrap_or(f64::NAN))
            .collect();
        Ok(KernelSnapshot { field, t, xs: xs.to_vec(), opts, flow_opts, values, scan_xs, scan_vals })
    }

    /// The measure with reciprocal transform `H_t - x`.
    pub fn kernel(&self, x: f64) -> Result<GridMeasure> {
        let h = TransformEvaluator::new(move |z| Ok(flow(self.field, z, self.t, &self.flow_opts)? - x), Provenance::Flow);
        let mut cands = Vec::new();
        for j in 1..self.scan_xs.len() {
            let (a, b) = (self.scan_vals[j - 1] - x, self.scan_vals[j] - x);
            if a.is_finite() && b.is_finite() && (a == 0.0 || (a > 0.0) != (b > 0.0)) {
                let (lo, hi) = (self.scan_xs[j - 1], self.scan_xs[j]);
                let g = |u: f64| h.eval(C64::new(u, 1e-13 * (1.0 + u.abs()))).map(|v| v.re).unwrap_or(f64::NAN);
                let gl = g(lo);
                let r = if gl == 0.0 { lo } else { crate::roots::bisect(g, lo, hi, gl.signum()) };
                cands.push(r);
            }
        }
        let atoms: Vec<(f64, f64)> = cands
            .into_iter()
            .map(|a| (a, atom_weight_at(&h, a, &self.opts.y_schedule)))
            .filter(|&(_, w)| w >= self.opts.atom_threshold)
            .collect();
        let atoms = AtomicMeasure::new(atoms)?;
        let mut density = Vec::with_capacity(self.xs.len());
        let mut bad = 0usize;
        for (j, &xj) in self.xs.iter().enumerate() {
            let mut vs = Vec::with_capacity(self.opts.eps.len());
            for (k, &e) in self.opts.eps.iter().enumerate() {
                let z = C64::new(xj, e);
                let mut g = (self.values[j][k] - x).inv();
                for &(a, w) in atoms.atoms() {
                    g -= w / (z - a);
                }
                vs.push(-g.im / PI);
            }
            let (d, spread) = crate::invert::richardson(&self.opts.eps, &vs).unwrap_or((f64::NAN, f64::INFINITY));
            if !d.is_finite() || spread > self.opts.stability_tol * (1.0 + d.abs()) {
                bad += 1;
            }
            density.push(if d.is_finite() { d.max(0.0) } else { 0.0 });
        }
        if bad as f64 > self.opts.max_unstable_fraction * self.xs.len() as f64 {
            return Err(Error::GridTooCoarse { bad, total: self.xs.len() });
        }
        let mut g = GridMeasure::new(self.xs.clone(), density, atoms)?;
        g.probability = (g.total_mass() - 1.0).abs() <= GRID_PROB_TOL;
        Ok(g)
    }
}

/// `μ_{t,x} = δ_x ▷ μ_t` sampled on `xs`.
pub fn markov_kernel(v: &VectorField, t: f64, x: f64, xs: &[f64]) -> Result<GridMeasure> {
    KernelSnapshot::new(v, t, xs, &[], InversionOptions::default(), FlowOptions::default())?.kernel(x)
}

/// Time-indexed record of a flow and the tracked quantities.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowResult {
    pub times: Vec<f64>,
    pub h_values: Vec<C64>,
    pub theta: Option<Vec<f64>>,
    pub weight: Option<Vec<f64>>,
    pub edge: Option<Vec<f64>>,
    pub case: Option<CaseLabel>,
}

/// Flow `z0` to `t_end` in `steps` equal steps, tracking the atom and the
/// support edge when the field's case allows it.
pub fn evolve(v: &VectorField, z0: C64, t_end: f64, steps: usize, opts: &FlowOptions) -> Result<FlowResult> {
    let times = sample_times(t_end, steps);
    let h_values = flow_times(v, z0, &times, opts)?;
    let mut res = FlowResult { times, h_values, theta: None, weight: None, edge: None, case: None };
    if let Ok(cls) = classify_field(v) {
        res.case = Some(cls.label);
        if let Ok(tr) = atom_track(v, t_end, steps) {
            res.theta = Some(tr.position);
            res.weight = Some(tr.weight);
        }
        if let Ok(e) = support_edge(v, t_end, steps) {
            res.edge = Some(e.edge);
        }
    }
    Ok(res)
}
