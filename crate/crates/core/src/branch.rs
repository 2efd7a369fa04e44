//! Complex powers with the argument taken in `(0, 2π)`.
//!
//! Points on the real axis carry a signed-zero imaginary part; `+0.0`
//! selects the boundary value from the upper half-plane.

use crate::{Error, Result, C64};
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

/// Argument of `w` in `[0, 2π)`.
pub fn arg_2pi(w: C64) -> f64 {
    let a = w.im.atan2(w.re);
    if a.is_sign_negative() {
        a + 2.0 * PI
    } else {
        a
    }
}

/// `w^s` with `arg w ∈ [0, 2π)`.
pub fn pow(w: C64, s: f64) -> C64 {
    let r = w.norm();
    if r == 0.0 {
        return C64::new(0.0, 0.0);
    }
    let th = arg_2pi(w) * s;
    let m = r.powf(s);
    C64::new(m * th.cos(), m * th.sin())
}

/// Square root with the result in the closed upper half-plane.
pub fn sqrt_upper(w: C64) -> C64 {
    pow(w, 0.5)
}

/// Like [`pow`], but refuses inputs that sit on the cut while the
/// caller's point is strictly inside the upper half-plane.
pub fn pow_checked(w: C64, s: f64, caller_in_uhp: bool) -> Result<C64> {
    if caller_in_uhp && w.re > 0.0 && w.im.abs() <= 1e-14 * (1.0 + w.re) {
        return Err(Error::BranchCutHit);
    }
    Ok(pow(w, s))
}

/// `arg` in `(-π, π]`, mapping `-π` to `π`.
pub fn arg_principal(w: C64) -> f64 {
    let a = w.im.atan2(w.re);
    if a <= -PI {
        PI
    } else if a < 0.0 && w.im == 0.0 {
        PI
    } else {
        a
    }
}
