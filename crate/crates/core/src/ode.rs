//! Dormand-Prince 5(4) integrator for autonomous scalar equations.

use crate::{Error, Result, C64};
use alloc::vec::Vec;
use core::ops::{Add, Mul, Sub};
#[allow(unused_imports)]
use num_traits::Float;

/// State types the integrator understands.
pub trait OdeState: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn size(self) -> f64;
    fn finite(self) -> bool;
}

impl OdeState for f64 {
    fn size(self) -> f64 {
        self.abs()
    }
    fn finite(self) -> bool {
        self.is_finite()
    }
}

impl OdeState for C64 {
    fn size(self) -> f64 {
        self.norm()
    }
    fn finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Tolerances and limits.
#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub atol: f64,
    pub rtol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { atol: 1e-10, rtol: 1e-10, max_steps: 1_000_000 }
    }
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

struct Stepper<S> {
    y: S,
    k1: S,
    t: f64,
    h: f64,
    steps: usize,
}

fn try_step<S: OdeState, F: FnMut(S) -> Result<S>>(f: &mut F, y: S, k1: S, h: f64) -> Option<(S, S, S)> {
    let ok = |v: Result<S>| v.ok().filter(|s| s.finite());
    let k2 = ok(f(y + k1 * (h * A21)))?;
    let k3 = ok(f(y + k1 * (h * A31) + k2 * (h * A32)))?;
    let k4 = ok(f(y + k1 * (h * A41) + k2 * (h * A42) + k3 * (h * A43)))?;
    let k5 = ok(f(y + k1 * (h * A51) + k2 * (h * A52) + k3 * (h * A53) + k4 * (h * A54)))?;
    let k6 = ok(f(y + k1 * (h * A61) + k2 * (h * A62) + k3 * (h * A63) + k4 * (h * A64) + k5 * (h * A65)))?;
    let yn = y + k1 * (h * B1) + k3 * (h * B3) + k4 * (h * B4) + k5 * (h * B5) + k6 * (h * B6);
    if !yn.finite() {
        return None;
    }
    let k7 = ok(f(yn))?;
    let err = k1 * (h * E1) + k3 * (h * E3) + k4 * (h * E4) + k5 * (h * E5) + k6 * (h * E6) + k7 * (h * E7);
    Some((yn, k7, err))
}

/// Integrate `y' = f(y)` from `(t0, y0)` and report the state at each of the
/// increasing `times` (all `>= t0`). A state rejected by `guard` causes the
/// step to be retried with a smaller size.
pub fn solve<S, F, G>(mut f: F, y0: S, t0: f64, times: &[f64], opts: &OdeOptions, mut guard: G) -> Result<Vec<S>>
where
    S: OdeState,
    F: FnMut(S) -> Result<S>,
    G: FnMut(S) -> bool,
{
    let k1 = f(y0)?;
    if !k1.finite() {
        return Err(Error::InvalidArgument(alloc::format!("vector field not finite at start")));
    }
    let mut st = Stepper { y: y0, k1, t: t0, h: 0.0, steps: 0 };
    let t_end = times.iter().cloned().fold(t0, f64::max);
    let scale = opts.atol + opts.rtol * y0.size();
    st.h = if k1.size() > 0.0 { 0.01 * scale.max(1e-6) / k1.size() * 1e4 } else { t_end - t0 };
    st.h = st.h.min((t_end - t0).max(0.0)).max(1e-12 * (1.0 + t_end.abs()));
    let mut out = Vec::with_capacity(times.len());
    for &target in times {
        while st.t < target {
            if st.steps >= opts.max_steps {
                return Err(Error::MaxStepsExceeded(opts.max_steps));
            }
            let remaining = target - st.t;
            let mut h = st.h.min(remaining);
            let last = h >= remaining;
            let h_min = 1e-15 * (1.0 + st.t.abs());
            loop {
                if h < h_min {
                    return Err(Error::StepUnderflow { t: st.t });
                }
                st.steps += 1;
                if st.steps > opts.max_steps {
                    return Err(Error::MaxStepsExceeded(opts.max_steps));
                }
                match try_step(&mut f, st.y, st.k1, h) {
                    Some((yn, k7, err)) => {
                        let sc = opts.atol + opts.rtol * st.y.size().max(yn.size());
                        let e = err.size() / sc;
                        if e <= 1.0 && guard(yn) {
                            st.t = if last && h >= remaining { target } else { st.t + h };
                            st.y = yn;
                            st.k1 = k7;
                            let fac = if e == 0.0 { 5.0 } else { (0.9 * e.powf(-0.2)).clamp(0.2, 5.0) };
                            st.h = h * fac;
                            break;
                        }
                        let fac = if e > 1.0 { (0.9 * e.powf(-0.2)).clamp(0.1, 0.5) } else { 0.25 };
                        h *= fac;
                    }
                    None => h *= 0.25,
                }
            }
        }
        out.push(st.y);
    }
    Ok(out)
}
