//! Acceptance criteria. Each test prints one `criterion N: PASS|FAIL` line.

use monoconv_core::alt::{
    boolean_convolve_atomic, boolean_subordinator_check, free_positivity_timeline, free_transition_time,
    FreeCounterexampleParams,
};
use monoconv_core::atomic::{interlacing_check, monotone_convolve_atomic, monotone_power, point_convolve};
use monoconv_core::bp::{dilation_conjugate, lambda_m, stable_pair, ClassicalTriple};
use monoconv_core::field::{field_eval, FieldCoefficients, Reflected, VectorField};
use monoconv_core::grid::{chebyshev, log_spaced, uniform};
use monoconv_core::invert::{stieltjes_invert, InversionOptions};
use monoconv_core::measure::{dilate, Family, GridMeasure};
use monoconv_core::moments::{convolve_moments, semigroup_moments};
use monoconv_core::nevanlinna::{collision_search, default_collision_seeds, divisibility_bound, finite_variance_rep};
use monoconv_core::semigroup::{atom_track, flow, flow_evaluator, subordinator_check, support_edge, KernelSnapshot};
use monoconv_core::stable::{stable_h, stable_hull, StableField};
use monoconv_core::transform::{reciprocal_transform, Provenance, TransformEvaluator};
use monoconv_core::{AtomicMeasure, Measure, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::time::Instant;

fn report(n: u32, ok: bool, detail: String) {
    println!("criterion {n}: {} ({detail})", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {n} failed: {detail}");
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random probability measure with `n` atoms in `[lo, hi]`, spaced at least `gap` apart.
fn random_atomic(r: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64, gap: f64) -> AtomicMeasure {
    loop {
        let mut xs: Vec<f64> = (0..n).map(|_| r.gen_range(lo..hi)).collect();
        xs.sort_by(|a, b| a.total_cmp(b));
        if xs.windows(2).any(|w| w[1] - w[0] < gap) {
            continue;
        }
        let ws: Vec<f64> = (0..n).map(|_| r.gen_range(0.05..1.0)).collect();
        let s: f64 = ws.iter().sum();
        return AtomicMeasure::new(xs.into_iter().zip(ws.into_iter().map(|w| w / s)).collect()).unwrap();
    }
}

fn raw_moments(atoms: &[(f64, f64)], n: usize) -> Vec<f64> {
    (0..=n).map(|k| atoms.iter().map(|&(x, w)| w * x.powi(k as i32)).sum()).collect()
}

fn sqrt_up(w: C64) -> C64 {
    let s = w.sqrt();
    if s.im < 0.0 {
        -s
    } else {
        s
    }
}

#[test]
fn criterion_01_atomic_exactness() {
    let mut r = rng(1);
    let mut worst_sum = 0.0f64;
    let mut bad = Vec::new();
    for i in 0..500 {
        let n = r.gen_range(1..=6);
        let nu = random_atomic(&mut r, n, -2.0, 2.0, 1e-2);
        let mut b = r.gen_range(-3.0..3.0);
        if b == 0.0 {
            b = 0.5;
        }
        let out = point_convolve(b, &nu).unwrap();
        let s: f64 = out.atoms().iter().map(|a| a.1).sum();
        worst_sum = worst_sum.max((s - 1.0).abs());
        let pos = out.atoms().iter().all(|a| a.1 > 0.0);
        let inter = interlacing_check(&nu.positions(), &out.positions(), b).valid;
        if (s - 1.0).abs() > 1e-10 || !pos || !inter {
            bad.push(i);
        }
    }
    let mut count_bad = 0;
    for _ in 0..100 {
        let (m, n) = (r.gen_range(1..=6), r.gen_range(1..=6));
        let mu = random_atomic(&mut r, m, -2.0, 2.0, 1e-2);
        let nu = random_atomic(&mut r, n, -2.0, 2.0, 1e-2);
        match monotone_convolve_atomic(&mu, &nu) {
            Ok(c) if c.len() == m * n => {}
            _ => count_bad += 1,
        }
    }
    report(
        1,
        bad.is_empty() && count_bad == 0,
        format!("max |Σw-1| = {worst_sum:.2e}, point failures {}, count failures {count_bad}", bad.len()),
    );
}

#[test]
fn criterion_02_worked_collision() {
    let nu = AtomicMeasure::probability(vec![(-1.0, 0.5), (1.0, 0.5)]).unwrap();
    let m = Measure::Atomic(nu.clone());
    let h = reciprocal_transform(&m).unwrap();
    let a = h.eval(C64::new(0.0, 0.5)).unwrap();
    let b = h.eval(C64::new(0.0, 2.0)).unwrap();
    let mut ok = (a - b).norm() < 1e-12 && (a - C64::new(0.0, 2.5)).norm() < 1e-12;
    let seeds = default_collision_seeds();
    let pair = collision_search(&h, &seeds).expect("collision");
    let rep = finite_variance_rep(&m).unwrap();
    let bound = divisibility_bound(&rep, pair).unwrap();
    ok &= bound.n_max == 1;
    let mut products = Vec::new();
    for n in 1..=4 {
        let p = Measure::Atomic(monotone_power(&nu, n).unwrap());
        let hp = reciprocal_transform(&p).unwrap();
        let (z1, z2) = collision_search(&hp, &seeds).expect("collision");
        let prod = z1.im * z2.im;
        ok &= (prod - 1.0).abs() < 1e-6 && (hp.eval(z1).unwrap() - hp.eval(z2).unwrap()).norm() < 1e-10;
        products.push(prod);
        if n == 2 {
            let rep2 = finite_variance_rep(&p).unwrap();
            ok &= divisibility_bound(&rep2, (z1, z2)).unwrap().n_max == 2;
        }
    }
    report(
        2,
        ok,
        format!("H(i/2) = {a:.12}, pair ({}, {}), n_max = {}, products {products:?}", pair.0, pair.1, bound.n_max),
    );
}

#[test]
fn criterion_03_moment_oracle() {
    let mut r = rng(3);
    let mut worst = 0.0f64;
    let mut worst_mv = 0.0f64;
    for _ in 0..100 {
        let (m, n) = (r.gen_range(1..=5), r.gen_range(1..=5));
        let mu = random_atomic(&mut r, m, -2.0, 2.0, 1e-2);
        let nu = random_atomic(&mut r, n, -2.0, 2.0, 1e-2);
        let conv = monotone_convolve_atomic(&mu, &nu).unwrap();
        let direct = raw_moments(conv.atoms(), 8);
        let (mm, mn) = (raw_moments(mu.atoms(), 8), raw_moments(nu.atoms(), 8));
        let formula = convolve_moments(&mm, &mn, 8).unwrap();
        for k in 0..=8 {
            worst = worst.max((formula[k] - direct[k]).abs() / direct[k].abs().max(1.0));
        }
        let var = |v: &[f64]| v[2] - v[1] * v[1];
        worst_mv = worst_mv.max((direct[1] - mm[1] - mn[1]).abs());
        worst_mv = worst_mv.max((var(&direct) - var(&mm) - var(&mn)).abs());
    }
    report(3, worst < 1e-9 && worst_mv < 1e-10, format!("moment rel err {worst:.2e}, mean/var err {worst_mv:.2e}"));
}

#[test]
fn criterion_04_semigroup_law() {
    let mut r = rng(4);
    let mut fields = vec![VectorField::arcsine(), VectorField::monotone_poisson(1.3)];
    for _ in 0..2 {
        let atoms: Vec<(f64, f64)> = (0..3).map(|_| (r.gen_range(-2.0..2.0), r.gen_range(0.1..1.0))).collect();
        fields.push(VectorField::atomic(r.gen_range(-1.0..1.0), atoms).unwrap());
    }
    let opts = Default::default();
    let mut worst = 0.0f64;
    for v in &fields {
        for _ in 0..50 {
            let z = C64::new(r.gen_range(-3.0..3.0), r.gen_range(0.1..3.0));
            let (t, s) = (r.gen_range(0.0..1.0), r.gen_range(0.0..1.0));
            let direct = flow(v, z, t + s, &opts).unwrap();
            let composed = flow(v, flow(v, z, s, &opts).unwrap(), t, &opts).unwrap();
            worst = worst.max((direct - composed).norm());
        }
    }
    report(4, worst < 1e-7, format!("max |H_(t+s) - H_t∘H_s| = {worst:.2e}"));
}

#[test]
fn criterion_05_arcsine_flow() {
    let v = VectorField::arcsine();
    let mut worst = 0.0f64;
    for &x in &[-2.0, -1.0, 0.0, 1.0, 2.0] {
        for &y in &[0.1, 0.5, 1.0, 2.0, 4.0] {
            let z = C64::new(x, y);
            for &t in &[0.25, 0.5, 1.0, 1.5, 2.0] {
                let h = flow(&v, z, t, &Default::default()).unwrap();
                worst = worst.max((h - sqrt_up(z * z - 2.0 * t)).norm());
            }
        }
    }
    report(5, worst < 1e-8, format!("max |H_t - sqrt(z^2-2t)| = {worst:.2e}"));
}

#[test]
fn criterion_06_atom_tracking() {
    let lam = 1.7;
    let tr = atom_track(&VectorField::monotone_poisson(lam), 3.0, 60).unwrap();
    let pois = tr.times.iter().zip(&tr.weight).map(|(t, w)| (w - (-lam * t).exp()).abs()).fold(0.0, f64::max);
    let c = 0.8;
    let tr = atom_track(&VectorField::deformed_arcsine(c), 3.0, 60).unwrap();
    let deformed = tr.times.iter().zip(&tr.weight).map(|(t, w)| (w - c / (c * c + t).sqrt()).abs()).fold(0.0, f64::max);
    let f = StableField::new(0.5, C64::new(1.0, 0.0), C64::new(-1.0, 0.0)).unwrap();
    let tr = atom_track(&Reflected(&f), 1.0, 10).unwrap();
    let death = tr.death_time.unwrap_or(f64::NAN);
    let ok = pois < 1e-8 && deformed < 1e-6 && (death - 1.0).abs() < 1e-6;
    report(6, ok, format!("Poisson weight err {pois:.2e}, deformed weight err {deformed:.2e}, death time {death:.9}"));
}

#[test]
fn criterion_07_support_edge() {
    let e = support_edge(&VectorField::arcsine(), 4.0, 400).unwrap();
    let arcsine = e
        .times
        .iter()
        .zip(&e.edge)
        .filter(|(t, _)| **t >= 0.01)
        .map(|(t, x)| (x + (2.0 * t).sqrt()).abs())
        .fold(0.0, f64::max);
    // upper end of the support is the atom until it dies at t = sqrt|c|
    let mut stable = 0.0f64;
    for &c in &[-1.0, -2.25] {
        let root = f64::sqrt(-c);
        let f = StableField::new(0.5, C64::new(1.0, 0.0), C64::new(c, 0.0)).unwrap();
        let tr = atom_track(&Reflected(&f), 0.95 * root, 20).unwrap();
        for (t, th) in tr.times.iter().zip(&tr.position) {
            let want = t * t - 2.0 * t * root;
            stable = stable.max((-th - want).abs());
            let (_, hi) = stable_hull(0.5, C64::new(1.0, 0.0), C64::new(c, 0.0), *t);
            if *t > 0.0 {
                stable = stable.max((hi - want).abs());
            }
        }
    }
    report(7, arcsine < 1e-6 && stable < 1e-6, format!("arcsine edge err {arcsine:.2e}, stable upper edge err {stable:.2e}"));
}

#[test]
fn criterion_08_inversion() {
    let semicircle = TransformEvaluator::new(|z: C64| Ok((z + sqrt_up(z * z - 4.0)) / 2.0), Provenance::ClosedForm);
    let xs = uniform(-2.5, 2.5, 101);
    let g = stieltjes_invert(&semicircle, &xs, &InversionOptions::default()).unwrap();
    let d0 = g.density_at(0.0);
    let arc = Measure::Family(Family::Arcsine { t: 1.0 });
    let h = reciprocal_transform(&arc).unwrap();
    let xs = uniform(-1.3, 1.3, 131);
    let g = stieltjes_invert(&h, &xs, &InversionOptions::default()).unwrap();
    let arc_err = xs
        .iter()
        .zip(&g.density)
        .map(|(x, d)| (d - 1.0 / (PI * (2.0 - x * x).sqrt())).abs())
        .fold(0.0, f64::max);
    let (t, c) = (1.0, 1.0);
    let da = Measure::Family(Family::DeformedArcsine { t, c });
    let h = reciprocal_transform(&da).unwrap();
    let g = stieltjes_invert(&h, &uniform(-3.0, 3.0, 241), &InversionOptions::default()).unwrap();
    let w = g.atoms.atoms().first().map_or(0.0, |a| a.1);
    let want = c / (c * c + 2.0 * t).sqrt();
    let ok = (d0 - 1.0 / PI).abs() < 1e-3 && arc_err < 1e-3 && (w - want).abs() < 1e-4;
    report(8, ok, format!("semicircle d(0) = {d0:.6}, arcsine sup err {arc_err:.2e}, atom weight {w:.6}"));
}

/// Mass of `μ_t` on `(-∞, -1e-9)` from inversion of the flow on a
/// log-spaced grid of the negative half-line.
fn negative_mass(v: &VectorField, t: f64) -> f64 {
    let r = FieldCoefficients::from_field(v, 2).unwrap();
    let m = semigroup_moments(&r, t, 2);
    let reach = (m[2] / 1e-4).sqrt().max(4.0);
    let xs: Vec<f64> = log_spaced(1e-9, reach, 600).into_iter().rev().map(|x| -x).collect();
    let snap = KernelSnapshot::new(v, t, &xs, &[], InversionOptions::default(), Default::default()).unwrap();
    let g = snap.kernel(0.0).unwrap();
    g.total_mass()
}

#[test]
fn criterion_09_subordinator_equivalence() {
    let mut r = rng(9);
    let mut mismatches = Vec::new();
    let mut trues = 0;
    for i in 0..20 {
        let n = r.gen_range(1..=3);
        let negative = i % 4 == 3;
        let atoms: Vec<(f64, f64)> = (0..n)
            .map(|k| {
                let x = if negative && k == 0 { r.gen_range(-2.0..-0.3) } else { r.gen_range(0.3..2.5) };
                (x, r.gen_range(0.2..1.0))
            })
            .collect();
        let inv: f64 = atoms.iter().map(|&(x, w)| w / x).sum();
        let gamma = if i % 2 == 0 { inv * r.gen_range(1.05..2.0) } else { inv * r.gen_range(0.0..0.7) };
        let v = VectorField::atomic(gamma, atoms).unwrap();
        let verdict = subordinator_check(&v).unwrap().holds;
        trues += verdict as usize;
        for &t in &[0.5, 1.0, 2.0] {
            let neg = negative_mass(&v, t);
            if (neg < 1e-3) != verdict {
                mismatches.push((i, t, neg, verdict));
            }
        }
    }
    report(9, mismatches.is_empty(), format!("{trues}/20 subordinators, mismatches {mismatches:?}"));
}

#[test]
fn criterion_10_bercovici_pata() {
    let sigma2 = 1.7;
    let gauss = ClassicalTriple { gamma: 0.0, tau: Measure::Atomic(AtomicMeasure::dirac(0.0).scaled(sigma2)) };
    let v = lambda_m(&gauss);
    let m = semigroup_moments(&FieldCoefficients::from_field(&v, 4).unwrap(), 1.0, 4);
    let moments_ok = (m[2] - sigma2).abs() < 1e-6 && (m[4] - 1.5 * sigma2 * sigma2).abs() < 1e-6;

    let lam = 2.3;
    let pois = lambda_m(&ClassicalTriple {
        gamma: lam / 2.0,
        tau: Measure::Atomic(AtomicMeasure::dirac(1.0).scaled(lam / 2.0)),
    });
    let mut r = rng(10);
    let mut pois_err = 0.0f64;
    for _ in 0..50 {
        let z = C64::new(r.gen_range(-3.0..3.0), r.gen_range(0.05..3.0));
        pois_err = pois_err.max((field_eval(&pois, z).unwrap() - lam * z / (1.0 - z)).norm());
    }

    // dilation commutes with the map: flow the conjugated field, compare with the dilated law
    let arc = VectorField::arcsine();
    let l = 2.0;
    let conj = dilation_conjugate(&arc, l).unwrap();
    let xs = uniform(-2.6, 2.6, 105);
    let opts = InversionOptions::default();
    let lhs = stieltjes_invert(&flow_evaluator(&conj, 1.0, Default::default()), &xs, &opts).unwrap();
    let base_xs: Vec<f64> = xs.iter().map(|x| x / l).collect();
    let base = stieltjes_invert(&flow_evaluator(&arc, 1.0, Default::default()), &base_xs, &opts).unwrap();
    let dilated = dilate(&Measure::Grid(base), l).unwrap();
    let Measure::Grid(dg) = dilated else { panic!("grid expected") };
    let dil_err = xs.iter().zip(&lhs.density).map(|(&x, d)| (d - dg.density_at(x)).abs()).fold(0.0, f64::max);

    // stable pair against the field b z^(1-α)
    let mut stable_err = 0.0f64;
    for &(alpha, b) in &[(0.5, C64::new(1.0, 0.0)), (1.5, C64::new(-1.0, 0.0)), (1.0, C64::new(0.0, 1.0))] {
        let v = stable_pair(alpha, b).unwrap();
        for &z in &[C64::new(0.5, 1.0), C64::new(-2.0, 0.5), C64::new(0.0, 3.0), C64::new(3.0, 2.0)] {
            let want = b * z.powf(1.0 - alpha);
            let got = field_eval(&v, z).unwrap();
            stable_err = stable_err.max((got - want).norm() / want.norm());
        }
    }
    let ok = moments_ok && pois_err < 1e-12 && dil_err < 1e-2 && stable_err < 1e-2;
    report(
        10,
        ok,
        format!(
            "m2 = {:.9}, m4 = {:.9}, Poisson field err {pois_err:.2e}, dilation err {dil_err:.2e}, stable rel err {stable_err:.2e}",
            m[2], m[4]
        ),
    );
}

#[test]
fn criterion_11_stable_self_similarity() {
    let mut r = rng(11);
    let zero = C64::new(0.0, 0.0);
    let mut worst = 0.0f64;
    let mut flow_err = 0.0f64;
    for &(alpha, b) in &[(0.5, 1.0), (2.0, -1.0), (1.5, -1.0)] {
        let b = C64::new(b, 0.0);
        let f = StableField::new(alpha, b, zero).unwrap();
        for _ in 0..20 {
            let a: f64 = r.gen_range(0.2..5.0);
            let t: f64 = r.gen_range(0.1..2.0);
            let z = C64::new(r.gen_range(-3.0..3.0), r.gen_range(0.1..3.0));
            let s = a.powf(1.0 / alpha);
            let lhs = stable_h(alpha, b, zero, a * t, z).unwrap();
            let rhs = stable_h(alpha, b, zero, t, z / s).unwrap() * s;
            worst = worst.max((lhs - rhs).norm());
            // the closed form against the flow of its field
            let fl = flow(&f, z, t, &Default::default()).unwrap();
            flow_err = flow_err.max((fl - stable_h(alpha, b, zero, t, z).unwrap()).norm());
        }
    }
    report(11, worst < 1e-10 && flow_err < 1e-7, format!("self-similarity err {worst:.2e}, flow vs closed form {flow_err:.2e}"));
}

#[test]
fn criterion_12_boolean() {
    let mu = AtomicMeasure::probability(vec![(-1.0, 0.5), (1.0, 0.5)]).unwrap();
    let b = boolean_convolve_atomic(&mu, &mu).unwrap();
    let s = 2f64.sqrt();
    let pos_ok = b.len() == 2 && (b.atoms()[0].0 + s).abs() < 1e-12 && (b.atoms()[1].0 - s).abs() < 1e-12;
    let w_ok = b.atoms().iter().all(|a| (a.1 - 0.5).abs() < 1e-12);
    let mut r = rng(12);
    let mut same = 0;
    for i in 0..20 {
        let atoms: Vec<(f64, f64)> = (0..2).map(|_| (r.gen_range(-1.0..3.0), r.gen_range(0.1..1.0))).collect();
        let gamma = if i % 2 == 0 { r.gen_range(0.0..5.0) } else { r.gen_range(-1.0..1.0) };
        let v = VectorField::atomic(gamma, atoms).unwrap();
        if boolean_subordinator_check(v.gamma, &v.tau).unwrap() == subordinator_check(&v).unwrap() {
            same += 1;
        }
    }
    report(12, pos_ok && w_ok && same == 20, format!("atoms {:?}, verdicts equal {same}/20", b.atoms()));
}

#[test]
fn criterion_13_free_timeline() {
    let start = Instant::now();
    let p = FreeCounterexampleParams { a: 1.0, c: 0.0, t: 0.0 };
    let ends = free_positivity_timeline(&p, &[0.5, 8.0]).unwrap();
    let ts: Vec<f64> = (1..=16).map(|k| 0.5 * k as f64).collect();
    let line = free_positivity_timeline(&p, &ts).unwrap();
    let switches = line.windows(2).filter(|w| w[0] != w[1]).count();
    let t0 = free_transition_time(&p, 0.5, 8.0, 1e-3).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let ok = !ends[0] && ends[1] && switches == 1 && secs < 60.0;
    report(13, ok, format!("verdicts {ends:?}, switches {switches}, transition near t = {t0:.4}, {secs:.1} s"));
}

#[test]
fn criterion_14_chapman_kolmogorov() {
    let v = VectorField::arcsine();
    let (t, s) = (0.5, 0.5);
    // μ_{t,0} is the arcsine law on [-1, 1]; Gauss–Chebyshev nodes integrate against it
    let n = 400;
    let nodes: Vec<f64> = (1..=n).map(|k| ((2 * k - 1) as f64 * PI / (2 * n) as f64).cos()).collect();
    let xs = chebyshev(-1.0, 1.0, 400);
    let scan = uniform(-2.0, 2.0, 401);
    let snap = KernelSnapshot::new(&v, s, &xs, &scan, InversionOptions::default(), Default::default()).unwrap();
    let kernels: Vec<GridMeasure> = nodes.iter().map(|&y| snap.kernel(y).unwrap()).collect();
    let mut r = rng(14);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let (a, b) = (r.gen_range(-1.6..1.6), r.gen_range(-1.6..1.6));
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let composed: f64 = kernels.iter().map(|k| k.mass_in(lo, hi)).sum::<f64>() / n as f64;
        // μ_{t+s,0}: arcsine law on [-√2, √2]
        let cdf = |x: f64| (x / 2f64.sqrt()).clamp(-1.0, 1.0).asin() / PI;
        let exact = cdf(hi) - cdf(lo);
        worst = worst.max((composed - exact).abs());
    }
    let _ = t;
    report(14, worst < 5e-3, format!("max interval discrepancy {worst:.2e}"));
}
