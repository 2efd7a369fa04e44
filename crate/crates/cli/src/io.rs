//! JSON and CSV formats.

use crate::CliError;
use monoconv_core::bp::ClassicalTriple;
use monoconv_core::field::VectorField;
use monoconv_core::{AtomicMeasure, Family, GridMeasure, Measure, Tail, C64};
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailJson {
    pub coef: f64,
    pub exponent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MeasureJson {
    Atomic {
        atoms: Vec<[f64; 2]>,
    },
    Grid {
        xs: Vec<f64>,
        density: Vec<f64>,
        #[serde(default)]
        atoms: Vec<[f64; 2]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        left_tail: Option<TailJson>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        right_tail: Option<TailJson>,
    },
    Family {
        name: String,
        params: serde_json::Value,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleJson {
    pub gamma: f64,
    pub tau: MeasureJson,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DiracP {
    a: f64,
}
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ArcsineP {
    t: f64,
}
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DeformedP {
    t: f64,
    c: f64,
}
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PoissonP {
    lambda: f64,
    t: f64,
}
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StableP {
    alpha: f64,
    b: [f64; 2],
    c: [f64; 2],
    t: f64,
}

fn params<T: for<'de> Deserialize<'de>>(name: &str, v: &serde_json::Value) -> Result<T, CliError> {
    serde_json::from_value(v.clone()).map_err(|e| CliError::Validation(format!("bad parameters for family {name}: {e}")))
}

fn atoms_of(v: &[[f64; 2]]) -> Vec<(f64, f64)> {
    v.iter().map(|a| (a[0], a[1])).collect()
}

fn atoms_json(a: &AtomicMeasure) -> Vec<[f64; 2]> {
    a.atoms().iter().map(|&(x, w)| [x, w]).collect()
}

fn tail_of(t: &Option<TailJson>) -> Option<Tail> {
    t.as_ref().map(|t| Tail { coef: t.coef, exponent: t.exponent })
}

fn tail_json(t: &Option<Tail>) -> Option<TailJson> {
    t.map(|t| TailJson { coef: t.coef, exponent: t.exponent })
}

impl MeasureJson {
    /// `probability` demands unit mass; Lévy measures only need to be finite.
    pub fn to_measure(&self, probability: bool) -> Result<Measure, CliError> {
        let m = match self {
            MeasureJson::Atomic { atoms } => {
                let a = atoms_of(atoms);
                Measure::Atomic(if probability { AtomicMeasure::probability(a)? } else { AtomicMeasure::new(a)? })
            }
            MeasureJson::Grid { xs, density, atoms, left_tail, right_tail } => {
                let a = AtomicMeasure::new(atoms_of(atoms))?;
                let g = GridMeasure::new(xs.clone(), density.clone(), a)?.with_tails(tail_of(left_tail), tail_of(right_tail));
                if probability && (g.total_mass() - 1.0).abs() > 1e-3 {
                    return Err(CliError::Validation(format!("grid measure has mass {}, expected 1", g.total_mass())));
                }
                Measure::Grid(g)
            }
            MeasureJson::Family { name, params: p } => {
                let f = match name.as_str() {
                    "dirac" => Family::Dirac { a: params::<DiracP>(name, p)?.a },
                    "arcsine" => Family::Arcsine { t: params::<ArcsineP>(name, p)?.t },
                    "deformed_arcsine" => {
                        let q: DeformedP = params(name, p)?;
                        Family::DeformedArcsine { t: q.t, c: q.c }
                    }
                    "monotone_poisson" => {
                        let q: PoissonP = params(name, p)?;
                        Family::MonotonePoisson { lambda: q.lambda, t: q.t }
                    }
                    "stable" => {
                        let q: StableP = params(name, p)?;
                        Family::Stable { alpha: q.alpha, b: C64::new(q.b[0], q.b[1]), c: C64::new(q.c[0], q.c[1]), t: q.t }
                    }
                    other => return Err(CliError::Validation(format!("unknown family {other:?}"))),
                };
                f.validate()?;
                Measure::Family(f)
            }
        };
        Ok(m)
    }

    pub fn from_measure(m: &Measure) -> Self {
        match m {
            Measure::Atomic(a) => MeasureJson::Atomic { atoms: atoms_json(a) },
            Measure::Grid(g) => MeasureJson::Grid {
                xs: g.xs.clone(),
                density: g.density.clone(),
                atoms: atoms_json(&g.atoms),
                left_tail: tail_json(&g.left_tail),
                right_tail: tail_json(&g.right_tail),
            },
            Measure::Family(f) => {
                let (name, params) = match *f {
                    Family::Dirac { a } => ("dirac", serde_json::json!({ "a": a })),
                    Family::Arcsine { t } => ("arcsine", serde_json::json!({ "t": t })),
                    Family::DeformedArcsine { t, c } => ("deformed_arcsine", serde_json::json!({ "t": t, "c": c })),
                    Family::MonotonePoisson { lambda, t } => ("monotone_poisson", serde_json::json!({ "lambda": lambda, "t": t })),
                    Family::Stable { alpha, b, c, t } => (
                        "stable",
                        serde_json::json!({ "alpha": alpha, "b": [b.re, b.im], "c": [c.re, c.im], "t": t }),
                    ),
                };
                MeasureJson::Family { name: name.into(), params }
            }
        }
    }
}

impl TripleJson {
    pub fn to_field(&self) -> Result<VectorField, CliError> {
        Ok(VectorField::new(self.gamma, self.tau.to_measure(false)?)?)
    }

    pub fn to_classical(&self) -> Result<ClassicalTriple, CliError> {
        let v = self.to_field()?;
        Ok(ClassicalTriple { gamma: v.gamma, tau: v.tau })
    }

    pub fn from_parts(gamma: f64, tau: &Measure) -> Self {
        TripleJson { gamma, tau: MeasureJson::from_measure(tau) }
    }
}

fn read_text(path: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Validation(format!("cannot read {path}: {e}")))
}

pub fn read_measure(path: &str) -> Result<MeasureJson, CliError> {
    serde_json::from_str(&read_text(path)?).map_err(|e| CliError::Validation(format!("{path}: {e}")))
}

/// A triple file, or one of the built-in names `arcsine` and `monotone_poisson`.
pub fn read_triple(source: &str) -> Result<TripleJson, CliError> {
    if !Path::new(source).exists() {
        let builtin = match source {
            "arcsine" => Some(VectorField::arcsine()),
            "monotone_poisson" => Some(VectorField::monotone_poisson(1.0)),
            _ => None,
        };
        if let Some(v) = builtin {
            return Ok(TripleJson::from_parts(v.gamma, &v.tau));
        }
    }
    serde_json::from_str(&read_text(source)?).map_err(|e| CliError::Validation(format!("{source}: {e}")))
}

/// Write to `path`, or to standard output when absent.
pub fn emit(path: Option<&str>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Validation(format!("cannot write {p}: {e}"))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| CliError::Validation(e.to_string()))
        }
    }
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string(v).expect("serialisable value");
    s.push('\n');
    s
}

/// 17 significant digits.
pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r.iter().map(|&x| fmt(x))).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

pub fn density_csv(g: &GridMeasure) -> String {
    csv_table(&["x", "density"], g.xs.iter().zip(&g.density).map(|(&x, &d)| vec![x, d]))
}

pub fn atoms_list(a: &AtomicMeasure) -> Vec<[f64; 2]> {
    atoms_json(a)
}

pub fn parse_complex(s: &str) -> Result<C64, CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<f64>().map_err(|_| CliError::Validation(format!("bad number {p:?} in {s:?}")));
    match parts.as_slice() {
        [re] => Ok(C64::new(num(re)?, 0.0)),
        [re, im] => Ok(C64::new(num(re)?, num(im)?)),
        _ => Err(CliError::Validation(format!("expected \"re,im\", got {s:?}"))),
    }
}

/// `"lo,hi,n"`: `n` equally spaced points.
pub fn parse_grid(s: &str) -> Result<(f64, f64, usize), CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || CliError::Validation(format!("expected \"lo,hi,n\", got {s:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].parse().map_err(|_| bad())?;
    let n: usize = parts[2].parse().map_err(|_| bad())?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi && n >= 2) {
        return Err(bad());
    }
    Ok((lo, hi, n))
}
