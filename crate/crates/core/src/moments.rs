//! Moments of measures, of monotone convolutions and of semigroups.

use crate::field::FieldCoefficients;
use crate::measure::{Family, Measure};
use crate::{Error, Result};
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

/// Highest order accepted by [`convolve_moments`].
pub const MAX_CONV_ORDER: usize = 16;

fn central_binomial_ratio(k: usize) -> f64 {
    // C(2k, k) / 4^k
    (1..=k).fold(1.0, |acc, j| acc * (2 * j - 1) as f64 / (2 * j) as f64)
}

/// Raw moments `m_0 ..= m_n`.
pub fn moments_of(m: &Measure, n: usize) -> Result<Vec<f64>> {
    match m {
        Measure::Atomic(a) => Ok(a.moments(n)),
        Measure::Grid(g) => g.moments(n),
        Measure::Family(f) => family_moments(f, n),
    }
}

fn family_moments(f: &Family, n: usize) -> Result<Vec<f64>> {
    f.validate()?;
    let coeffs = |r: Vec<f64>, t: f64| semigroup_moments(&FieldCoefficients { r }, t, n);
    match *f {
        Family::Dirac { a } => Ok((0..=n).map(|k| a.powi(k as i32)).collect()),
        Family::Arcsine { t } => Ok((0..=n)
            .map(|k| if k % 2 == 1 { 0.0 } else { (2.0 * t).powi((k / 2) as i32) * central_binomial_ratio(k / 2) })
            .collect()),
        Family::DeformedArcsine { t, c } => {
            let r = (1..=n.max(1)).map(|k| if k == 1 { 0.0 } else { c.powi(k as i32 - 2) }).collect();
            Ok(coeffs(r, t))
        }
        Family::MonotonePoisson { lambda, t } => Ok(coeffs(vec![lambda; n.max(1)], t)),
        Family::Stable { alpha, b, c, t } => {
            if alpha == 1.0 && b.im == 0.0 {
                let a = -b.re * t;
                return Ok((0..=n).map(|k| a.powi(k as i32)).collect());
            }
            if alpha == 2.0 && c.im == 0.0 {
                let r = (1..=n.max(1)).map(|k| if k == 1 { 0.0 } else { -0.5 * b.re * c.re.powi(k as i32 - 2) }).collect();
                return Ok(coeffs(r, t));
            }
            if alpha == 2.0 {
                return Err(Error::Unsupported("moments of a quadratic stable law with complex shift".into()));
            }
            if alpha > 1.0 {
                if n >= 2 {
                    return Err(Error::DivergentMoment(2));
                }
                return Ok(vec![1.0, 0.0][..=n].to_vec());
            }
            if n >= 1 {
                return Err(Error::DivergentMoment(1));
            }
            Ok(vec![1.0])
        }
    }
}

/// Moments of `μ ▷ ν` up to order `order` from those of `μ` and `ν`:
/// `m_l = Σ_k m_k(μ) Σ_{j_0+...+j_k = l-k} Π m_{j_p}(ν)`.
pub fn convolve_moments(mu: &[f64], nu: &[f64], order: usize) -> Result<Vec<f64>> {
    if order > MAX_CONV_ORDER {
        return Err(Error::InvalidArgument(alloc::format!("order {order} exceeds {MAX_CONV_ORDER}")));
    }
    if mu.len() <= order || nu.len() <= order {
        return Err(Error::InvalidArgument("not enough input moments".into()));
    }
    // pw[p][s]: sum over compositions of s into p parts of products of ν-moments
    let mut pw = vec![vec![0.0; order + 1]; order + 2];
    pw[0][0] = 1.0;
    for p in 1..=order + 1 {
        for s in 0..=order {
            pw[p][s] = (0..=s).map(|j| nu[j] * pw[p - 1][s - j]).sum();
        }
    }
    Ok((0..=order).map(|l| (0..=l).map(|k| mu[k] * pw[k + 1][l - k]).sum()).collect())
}

/// `m_0(t) ..= m_n(t)` of the semigroup with coefficients `r`:
/// `m_n(t) = Σ_k t^k/k! Σ_{1 = i_0 < ... < i_k = n+1} Π i_{p-1} r_{i_p - i_{p-1}}`.
pub fn semigroup_moments(r: &FieldCoefficients, t: f64, n: usize) -> Vec<f64> {
    // d[k][j]: chains of length k from 1 to j
    let mut d = vec![vec![0.0; n + 2]; n + 1];
    d[0][1] = 1.0;
    for k in 1..=n {
        for j in (k + 1)..=(n + 1) {
            d[k][j] = (k..j).map(|i| d[k - 1][i] * i as f64 * r.get(j - i)).sum();
        }
    }
    (0..=n)
        .map(|m| {
            let mut fact = 1.0;
            let mut tk = 1.0;
            let mut s = if m == 0 { 1.0 } else { 0.0 };
            for k in 1..=m {
                fact *= k as f64;
                tk *= t;
                s += tk / fact * d[k][m + 1];
            }
            s
        })
        .collect()
}

/// `m_n(t)` alone.
pub fn semigroup_moment(r: &FieldCoefficients, t: f64, n: usize) -> f64 {
    semigroup_moments(r, t, n)[n]
}

/// Right side of `dm_n/dt = Σ_{k=1}^{n} k r_{n-k+1} m_{k-1}` for `n = 0..len`.
pub fn moment_ode_rhs(r: &FieldCoefficients, m: &[f64]) -> Vec<f64> {
    (0..m.len()).map(|n| (1..=n).map(|k| k as f64 * r.get(n - k + 1) * m[k - 1]).sum()).collect()
}

/// `max_n |m_n(t+s) - (μ_t ▷ μ_s)_n|` for `n ≤ order`.
pub fn semigroup_consistency(r: &FieldCoefficients, t: f64, s: f64, order: usize) -> Result<f64> {
    let lhs = semigroup_moments(r, t + s, order);
    let rhs = convolve_moments(&semigroup_moments(r, t, order), &semigroup_moments(r, s, order), order)?;
    Ok(lhs.iter().zip(&rhs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

/// `γ = 0` and `τ` symmetric, for compactly supported `τ`.
pub fn symmetry_diagnostic(gamma: f64, tau: &Measure, order: usize) -> Result<bool> {
    if gamma.abs() >= 1e-12 {
        return Ok(false);
    }
    match tau {
        Measure::Atomic(a) => {
            let m = a.moments(order);
            let scale: Vec<f64> =
                (0..=order).map(|k| a.atoms().iter().map(|&(x, w)| w * x.abs().powi(k as i32)).sum()).collect();
            Ok((1..=order).step_by(2).all(|k| m[k].abs() <= 1e-10 * (1.0 + scale[k])))
        }
        Measure::Grid(g) => {
            if g.left_tail.is_some() || g.right_tail.is_some() {
                return Err(Error::Unsupported("symmetry test needs a compactly supported Levy measure".into()));
            }
            let at = g.atoms.atoms();
            let atoms_sym = at.iter().all(|&(x, w)| {
                at.iter().any(|&(y, v)| (x + y).abs() <= 1e-9 * (1.0 + x.abs()) && (w - v).abs() <= 1e-10 * (1.0 + w))
            });
            let peak = g.density.iter().cloned().fold(0.0, f64::max);
            let dens_sym = g.xs.iter().zip(&g.density).all(|(&x, &d)| (d - g.density_at(-x)).abs() <= 1e-8 * (1.0 + peak));
            Ok(atoms_sym && dens_sym)
        }
        Measure::Family(f) => Ok(match *f {
            Family::Dirac { a } => a == 0.0,
            Family::Arcsine { .. } => true,
            Family::DeformedArcsine { c, .. } => c == 0.0,
            Family::MonotonePoisson { .. } => false,
            Family::Stable { .. } => return Err(Error::Unsupported("symmetry test for stable Levy measures".into())),
        }),
    }
}

/// Whether `∫ x^{2n} dτ < ∞`.
pub fn even_moment_tail_check(tau: &Measure, n: usize) -> bool {
    moments_of(tau, 2 * n).is_ok()
}
