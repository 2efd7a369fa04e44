//! `monoconv` command-line front end.
//!
//! Exit codes: 0 success, 2 invalid input, 3 numerical failure.

pub mod io;

use clap::{Args, Parser, Subcommand, ValueEnum};
use io::{MeasureJson, TripleJson};
use monoconv_core::alt::{boolean_convolve, boolean_convolve_atomic};
use monoconv_core::atomic::monotone_convolve_atomic;
use monoconv_core::bp::{classical_positivity_condition, lambda_m, lambda_m_inverse};
use monoconv_core::field::{FieldCoefficients, Reflected, VectorField};
use monoconv_core::grid::{chebyshev, geometric_desc, uniform};
use monoconv_core::invert::InversionOptions;
use monoconv_core::moments::{convolve_moments, moments_of, semigroup_moments, symmetry_diagnostic};
use monoconv_core::nevanlinna::{
    collision_search, default_collision_seeds, divisibility_bound, finite_variance_rep, nevanlinna_rep, positivity_check,
};
use monoconv_core::semigroup::{
    bounded_below_check, flow_times, subordinator_check, support_edge, FlowOptions, KernelSnapshot, PositivityVerdict,
};
use monoconv_core::stable::{stable_density, stable_support_case};
use monoconv_core::transform::reciprocal_transform;
use monoconv_core::{Error, Measure, C64};
use serde_json::json;

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Numeric(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "error: {m}"),
            CliError::Numeric(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::PoleAt(_)
            | Error::ZeroG
            | Error::GridTooCoarse { .. }
            | Error::AtomCollision { .. }
            | Error::StepUnderflow { .. }
            | Error::MaxStepsExceeded(_)
            | Error::BranchCutHit => CliError::Numeric(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

type Res<T> = Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "monoconv", version, about = "Monotone convolution, semigroups and related transforms")]
struct Cli {
    #[command(flatten)]
    tol: Tolerances,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Debug, Clone)]
struct Tolerances {
    /// Absolute tolerance of the flow integrator.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol_atol: f64,
    /// Relative tolerance of the flow integrator.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol_rtol: f64,
    /// Atoms lighter than this are dropped during inversion.
    #[arg(long, global = true, default_value_t = 1e-5)]
    tol_atom: f64,
    /// Relative spread above which an inverted density value counts as unstable.
    #[arg(long, global = true, default_value_t = 1e-2)]
    tol_stability: f64,
}

impl Tolerances {
    fn flow(&self) -> Res<FlowOptions> {
        let mut o = FlowOptions { atol: self.tol_atol, rtol: self.tol_rtol, ..FlowOptions::default() };
        if let Ok(s) = std::env::var("MONOCONV_MAX_STEPS") {
            o.max_steps = s.trim().parse().map_err(|_| CliError::Validation(format!("MONOCONV_MAX_STEPS={s:?} is not an integer")))?;
        }
        if !(o.atol > 0.0 && o.rtol > 0.0) {
            return Err(CliError::Validation("integrator tolerances must be positive".into()));
        }
        Ok(o)
    }

    fn inversion(&self) -> InversionOptions {
        InversionOptions { atom_threshold: self.tol_atom, stability_tol: self.tol_stability, ..InversionOptions::default() }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Monotone convolution `left ▷ right`.
    Convolve(ConvArgs),
    /// Boolean convolution.
    Bconvolve(BoolArgs),
    /// Flow values `H_t(z)`.
    Evolve(EvolveArgs),
    /// Density of `μ_t` for a triple.
    Density(DensityArgs),
    /// Moments of a measure or of `μ_t`.
    Moments(MomentArgs),
    /// Structural checks.
    Check(CheckArgs),
    /// Strictly stable laws.
    Stable(StableArgs),
    /// Map a classical triple to the monotone one (or back).
    Bpmap(BpArgs),
    /// Transition kernel `μ_{t,x}`.
    Markov(MarkovArgs),
}

#[derive(Args, Debug)]
struct ConvArgs {
    #[arg(long)]
    left: String,
    #[arg(long)]
    right: String,
    #[arg(long)]
    out: Option<String>,
    /// Moment order used when an input is not atomic.
    #[arg(long, default_value_t = 8)]
    order: usize,
}

#[derive(Args, Debug)]
struct BoolArgs {
    #[arg(long)]
    left: String,
    #[arg(long)]
    right: String,
    #[arg(long)]
    out: Option<String>,
    /// `"lo,hi,n"` inversion grid, needed unless both inputs are atomic.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
}

#[derive(Args, Debug)]
struct EvolveArgs {
    #[arg(long)]
    triple: String,
    #[arg(long, allow_hyphen_values = true)]
    t: f64,
    /// Starting point `"re,im"`; the path is sampled at `--steps` times.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "grid", required_unless_present = "grid")]
    z: Option<String>,
    /// Starting points `x + i y` for `x` on `"lo,hi,n"`.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
    y: f64,
    #[arg(long, default_value_t = 10)]
    steps: usize,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args, Debug)]
struct DensityArgs {
    #[arg(long)]
    triple: String,
    #[arg(long, allow_hyphen_values = true)]
    t: f64,
    /// `"lo,hi,n"`; by default Chebyshev nodes between the support edges.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Number of default grid nodes.
    #[arg(long, default_value_t = 2000)]
    points: usize,
    /// CSV destination; standard output by default.
    #[arg(long)]
    out: Option<String>,
    /// Atoms JSON destination; standard output when `--out` is given.
    #[arg(long)]
    atoms_out: Option<String>,
}

#[derive(Args, Debug)]
struct MomentArgs {
    #[arg(long, conflicts_with = "triple", required_unless_present = "triple")]
    measure: Option<String>,
    #[arg(long, requires = "t")]
    triple: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    t: Option<f64>,
    #[arg(long)]
    order: usize,
    #[arg(long)]
    out: Option<String>,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum CheckKind {
    Injectivity,
    Positivity,
    Symmetry,
    Subordinator,
    BoundedBelow,
}

#[derive(Args, Debug)]
struct CheckArgs {
    kind: CheckKind,
    #[arg(long, conflicts_with = "triple")]
    measure: Option<String>,
    #[arg(long)]
    triple: Option<String>,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args, Debug)]
struct StableArgs {
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, allow_hyphen_values = true)]
    b: String,
    #[arg(long, allow_hyphen_values = true, default_value = "0,0")]
    c: String,
    #[arg(long, allow_hyphen_values = true)]
    t: f64,
    /// `"lo,hi,n"` grid for the density.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "case", required_unless_present = "case")]
    density: Option<String>,
    /// Report the support case and atom.
    #[arg(long)]
    case: bool,
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    atoms_out: Option<String>,
}

#[derive(Args, Debug)]
struct BpArgs {
    #[arg(long)]
    classical: String,
    /// Treat the input as a monotone triple and return the classical one.
    #[arg(long)]
    reverse: bool,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args, Debug)]
struct MarkovArgs {
    #[arg(long)]
    triple: String,
    #[arg(long, allow_hyphen_values = true)]
    t: f64,
    #[arg(long, allow_hyphen_values = true)]
    x: f64,
    #[arg(long, allow_hyphen_values = true)]
    grid: String,
    #[arg(long)]
    out: Option<String>,
}

/// Parse `argv` (program name first), execute, and return the exit code.
pub fn run(argv: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.code()
        }
    }
}

fn dispatch(cli: &Cli) -> Res<()> {
    match &cli.cmd {
        Command::Convolve(a) => convolve(a),
        Command::Bconvolve(a) => bconvolve(a),
        Command::Evolve(a) => evolve(a, &cli.tol),
        Command::Density(a) => density(a, &cli.tol),
        Command::Moments(a) => moments(a),
        Command::Check(a) => check(a),
        Command::Stable(a) => stable(a),
        Command::Bpmap(a) => bpmap(a),
        Command::Markov(a) => markov(a, &cli.tol),
    }
}

fn non_negative_time(t: f64) -> Res<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(CliError::Validation(format!("time must be finite and non-negative, got {t}")))
    }
}

fn convolve(a: &ConvArgs) -> Res<()> {
    let mu = io::read_measure(&a.left)?.to_measure(true)?;
    let nu = io::read_measure(&a.right)?.to_measure(true)?;
    let text = match (&mu, &nu) {
        (Measure::Atomic(m), Measure::Atomic(n)) => {
            io::to_json(&MeasureJson::from_measure(&Measure::Atomic(monotone_convolve_atomic(m, n)?)))
        }
        _ => {
            let m = convolve_moments(&moments_of(&mu, a.order)?, &moments_of(&nu, a.order)?, a.order)?;
            io::to_json(&json!({ "moments": m }))
        }
    };
    io::emit(a.out.as_deref(), &text)
}

fn bconvolve(a: &BoolArgs) -> Res<()> {
    let mu = io::read_measure(&a.left)?.to_measure(true)?;
    let nu = io::read_measure(&a.right)?.to_measure(true)?;
    let out = match (&mu, &nu) {
        (Measure::Atomic(m), Measure::Atomic(n)) => Measure::Atomic(boolean_convolve_atomic(m, n)?),
        _ => {
            let g = a.grid.as_deref().ok_or_else(|| CliError::Validation("--grid is required for non-atomic inputs".into()))?;
            let (lo, hi, n) = io::parse_grid(g)?;
            boolean_convolve(&mu, &nu, &uniform(lo, hi, n))?
        }
    };
    io::emit(a.out.as_deref(), &io::to_json(&MeasureJson::from_measure(&out)))
}

fn evolve(a: &EvolveArgs, tol: &Tolerances) -> Res<()> {
    non_negative_time(a.t)?;
    let v = io::read_triple(&a.triple)?.to_field()?;
    let opts = tol.flow()?;
    let text = if let Some(z) = &a.z {
        let z0 = io::parse_complex(z)?;
        if z0.im <= 0.0 {
            return Err(CliError::Validation("starting point must lie in the upper half-plane".into()));
        }
        let steps = a.steps.max(1);
        let times: Vec<f64> = (0..=steps).map(|k| a.t * k as f64 / steps as f64).collect();
        let hs = flow_times(&v, z0, &times, &opts)?;
        io::csv_table(&["t", "re", "im"], times.iter().zip(&hs).map(|(&t, h)| vec![t, h.re, h.im]))
    } else {
        let (lo, hi, n) = io::parse_grid(a.grid.as_deref().unwrap_or_default())?;
        if !(a.y > 0.0) {
            return Err(CliError::Validation("--y must be positive".into()));
        }
        let mut rows = Vec::with_capacity(n);
        for x in uniform(lo, hi, n) {
            let h = flow_times(&v, C64::new(x, a.y), &[a.t], &opts)?[0];
            rows.push(vec![x, h.re, h.im]);
        }
        io::csv_table(&["x", "re", "im"], rows)
    };
    io::emit(a.out.as_deref(), &text)
}

/// Edges of the continuous support of `μ_t`, from the edge ODE on both sides.
fn support_hull(v: &VectorField, t: f64) -> Res<(f64, f64)> {
    let lo = support_edge(v, t, 1)?.edge.last().copied();
    let hi = support_edge(&Reflected(v), t, 1)?.edge.last().map(|e| -e);
    match (lo, hi) {
        (Some(lo), Some(hi)) if lo.is_finite() && hi.is_finite() && lo < hi => Ok((lo, hi)),
        _ => Err(CliError::Validation("support edges unavailable; pass --grid".into())),
    }
}

fn emit_density(out: Option<&str>, atoms_out: Option<&str>, csv: &str, atoms: serde_json::Value) -> Res<()> {
    io::emit(out, csv)?;
    let text = io::to_json(&atoms);
    match (atoms_out, out) {
        (Some(p), _) => io::emit(Some(p), &text),
        (None, Some(_)) => io::emit(None, &text),
        (None, None) => Ok(()),
    }
}

fn density(a: &DensityArgs, tol: &Tolerances) -> Res<()> {
    non_negative_time(a.t)?;
    if a.t == 0.0 {
        return Err(CliError::Validation("μ_0 is a point mass; use t > 0".into()));
    }
    let v = io::read_triple(&a.triple)?.to_field()?;
    let (xs, scan) = match &a.grid {
        Some(g) => {
            let (lo, hi, n) = io::parse_grid(g)?;
            (uniform(lo, hi, n), Vec::new())
        }
        None => {
            if a.points < 2 {
                return Err(CliError::Validation("--points must be at least 2".into()));
            }
            let (lo, hi) = support_hull(&v, a.t)?;
            let w = hi - lo;
            (chebyshev(lo, hi, a.points), uniform(lo - w, hi + w, 801))
        }
    };
    // Chebyshev nodes sit within 1e-6 of square-root edges; the heights
    // must go below that for the extrapolation to see the edge behaviour
    let mut inv = tol.inversion();
    inv.eps = geometric_desc(1e-2, 1e-10, 17);
    let snap = KernelSnapshot::new(&v, a.t, &xs, &scan, inv, tol.flow()?)?;
    let g = snap.kernel(0.0)?;
    emit_density(a.out.as_deref(), a.atoms_out.as_deref(), &io::density_csv(&g), json!({ "atoms": io::atoms_list(&g.atoms) }))
}

fn moments(a: &MomentArgs) -> Res<()> {
    let m = match (&a.measure, &a.triple, a.t) {
        (Some(p), _, _) => moments_of(&io::read_measure(p)?.to_measure(true)?, a.order)?,
        (None, Some(p), Some(t)) => {
            non_negative_time(t)?;
            let v = io::read_triple(p)?.to_field()?;
            semigroup_moments(&FieldCoefficients::from_field(&v, a.order)?, t, a.order)
        }
        _ => return Err(CliError::Validation("pass --measure or --triple with --t".into())),
    };
    io::emit(a.out.as_deref(), &io::to_json(&json!({ "moments": m })))
}

fn verdict_json(kind: &str, v: &PositivityVerdict) -> serde_json::Value {
    json!({
        "check": kind,
        "holds": v.holds,
        "failing_condition": v.failure.map(|f| f.describe()),
        "inverse_moment": v.inverse_moment,
    })
}

fn check(a: &CheckArgs) -> Res<()> {
    let need_measure = || -> Res<Measure> {
        let p = a.measure.as_deref().ok_or_else(|| CliError::Validation("this check needs --measure".into()))?;
        io::read_measure(p)?.to_measure(true)
    };
    let need_triple = || -> Res<VectorField> {
        let p = a.triple.as_deref().ok_or_else(|| CliError::Validation("this check needs --triple".into()))?;
        io::read_triple(p)?.to_field()
    };
    let out = match a.kind {
        CheckKind::Injectivity => {
            let m = need_measure()?;
            let h = reciprocal_transform(&m)?;
            match collision_search(&h, &default_collision_seeds()) {
                Some((z1, z2)) => {
                    let bound = divisibility_bound(&finite_variance_rep(&m)?, (z1, z2))?;
                    json!({
                        "check": "injectivity",
                        "injective": false,
                        "collision": [[z1.re, z1.im], [z2.re, z2.im]],
                        "not_n_divisible_for_n_gt": bound.n_max,
                    })
                }
                None => json!({ "check": "injectivity", "injective": true, "collision": null }),
            }
        }
        CheckKind::Positivity => match (&a.measure, &a.triple) {
            (Some(_), _) => match need_measure()? {
                Measure::Atomic(m) => {
                    let rep = nevanlinna_rep(&m)?;
                    json!({ "check": "positivity", "holds": positivity_check(&rep), "b": rep.b, "eta": MeasureJson::from_measure(&rep.eta) })
                }
                _ => return Err(CliError::Validation("positivity of a measure is tested for atomic input only".into())),
            },
            _ => verdict_json("positivity", &classical_positivity_condition(&lambda_m_inverse(&need_triple()?))?),
        },
        CheckKind::Symmetry => {
            let v = need_triple()?;
            json!({ "check": "symmetry", "holds": symmetry_diagnostic(v.gamma, &v.tau, 8)? })
        }
        CheckKind::Subordinator => verdict_json("subordinator", &subordinator_check(&need_triple()?)?),
        CheckKind::BoundedBelow => json!({ "check": "bounded-below", "holds": bounded_below_check(&need_triple()?) }),
    };
    io::emit(a.out.as_deref(), &io::to_json(&out))
}

fn stable(a: &StableArgs) -> Res<()> {
    non_negative_time(a.t)?;
    let b = io::parse_complex(&a.b)?;
    let c = io::parse_complex(&a.c)?;
    if a.case {
        let s = stable_support_case(a.alpha, b, c, a.t)?;
        let end = |x: f64| if x.is_finite() { json!(x) } else { serde_json::Value::Null };
        let out = json!({
            "case_id": s.case_id,
            "ac_support": s.ac_support.map(|(lo, hi)| json!([end(lo), end(hi)])),
            "atom": s.atom.map(|(x, w)| [x, w]),
        });
        return io::emit(a.out.as_deref(), &io::to_json(&out));
    }
    let (lo, hi, n) = io::parse_grid(a.density.as_deref().unwrap_or_default())?;
    let d = stable_density(a.alpha, b, c, a.t, &uniform(lo, hi, n))?;
    emit_density(
        a.out.as_deref(),
        a.atoms_out.as_deref(),
        &io::density_csv(&d.measure),
        json!({ "atoms": io::atoms_list(&d.measure.atoms), "closed_form": d.closed_form }),
    )
}

fn bpmap(a: &BpArgs) -> Res<()> {
    let input = io::read_triple(&a.classical)?;
    let out = if a.reverse {
        let c = lambda_m_inverse(&input.to_field()?);
        TripleJson::from_parts(c.gamma, &c.tau)
    } else {
        let v = lambda_m(&input.to_classical()?);
        TripleJson::from_parts(v.gamma, &v.tau)
    };
    io::emit(a.out.as_deref(), &io::to_json(&out))
}

fn markov(a: &MarkovArgs, tol: &Tolerances) -> Res<()> {
    non_negative_time(a.t)?;
    let v = io::read_triple(&a.triple)?.to_field()?;
    let (lo, hi, n) = io::parse_grid(&a.grid)?;
    let xs = uniform(lo, hi, n);
    let g = KernelSnapshot::new(&v, a.t, &xs, &[], tol.inversion(), tol.flow()?)?.kernel(a.x)?;
    io::emit(a.out.as_deref(), &io::density_csv(&g))
}
