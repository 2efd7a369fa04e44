//! End-to-end runs of the command line.

use monoconv::io::{MeasureJson, TripleJson};
use monoconv_core::C64;
use std::path::{Path, PathBuf};
use std::process::Command;
use tempfile::TempDir;

fn run(args: &[&str]) -> i32 {
    let mut argv = vec!["monoconv".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    monoconv::run(argv)
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn out(dir: &TempDir, name: &str) -> (PathBuf, String) {
    let p = dir.path().join(name);
    let s = p.to_str().unwrap().to_string();
    (p, s)
}

fn json(p: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn csv_columns(p: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_path(p).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(|v| v.parse().unwrap()).collect()).collect();
    (header, rows)
}

const TWO_POINT: &str = r#"{"kind":"atomic","atoms":[[-1,0.5],[1,0.5]]}"#;

fn h_atomic(atoms: &[(f64, f64)], z: C64) -> C64 {
    1.0 / atoms.iter().map(|&(x, w)| w / (z - x)).sum::<C64>()
}

#[test]
fn convolve_two_atomic_inputs() {
    let d = TempDir::new().unwrap();
    let left = write(&d, "l.json", r#"{"kind":"atomic","atoms":[[0,0.3],[2,0.7]]}"#);
    let right = write(&d, "r.json", TWO_POINT);
    let (p, o) = out(&d, "o.json");
    assert_eq!(run(&["convolve", "--left", &left, "--right", &right, "--out", &o]), 0);
    let v = json(&p);
    assert_eq!(v["kind"], "atomic");
    let atoms: Vec<(f64, f64)> =
        v["atoms"].as_array().unwrap().iter().map(|a| (a[0].as_f64().unwrap(), a[1].as_f64().unwrap())).collect();
    assert_eq!(atoms.len(), 4);
    assert!((atoms.iter().map(|a| a.1).sum::<f64>() - 1.0).abs() < 1e-12);
    let mu = [(0.0, 0.3), (2.0, 0.7)];
    let nu = [(-1.0, 0.5), (1.0, 0.5)];
    for z in [C64::new(0.4, 0.8), C64::new(-2.0, 0.1), C64::new(3.0, 2.0)] {
        let want = h_atomic(&mu, h_atomic(&nu, z));
        assert!((h_atomic(&atoms, z) - want).norm() < 1e-9);
    }
}

#[test]
fn injectivity_of_two_point_measure() {
    let d = TempDir::new().unwrap();
    let m = write(&d, "m.json", TWO_POINT);
    let (p, o) = out(&d, "v.json");
    assert_eq!(run(&["check", "injectivity", "--measure", &m, "--out", &o]), 0);
    let v = json(&p);
    assert_eq!(v["injective"], false);
    assert_eq!(v["not_n_divisible_for_n_gt"], 1);
    let c = &v["collision"];
    let want = [[0.0, 0.5], [0.0, 2.0]];
    for i in 0..2 {
        for j in 0..2 {
            assert!((c[i][j].as_f64().unwrap() - want[i][j]).abs() < 1e-8, "{c}");
        }
    }
}

#[test]
fn arcsine_density_has_unit_mass() {
    let d = TempDir::new().unwrap();
    let (p, o) = out(&d, "d.csv");
    let (pa, oa) = out(&d, "a.json");
    assert_eq!(run(&["density", "--triple", "arcsine", "--t", "1", "--out", &o, "--atoms-out", &oa]), 0);
    let (header, rows) = csv_columns(&p);
    assert_eq!(header, ["x", "density"]);
    let mass: f64 = rows.windows(2).map(|w| 0.5 * (w[1][0] - w[0][0]) * (w[0][1] + w[1][1])).sum();
    assert!((mass - 1.0).abs() < 1e-3, "mass {mass}");
    assert_eq!(json(&pa)["atoms"].as_array().unwrap().len(), 0);
    let text = std::fs::read_to_string(&p).unwrap();
    assert!(!text.contains('\r'));
    let first = text.lines().nth(1).unwrap();
    let digits = first.split(',').next().unwrap().split('e').next().unwrap().replace(['-', '.'], "");
    assert_eq!(digits.len(), 17);
}

#[test]
fn emitted_measures_round_trip() {
    let d = TempDir::new().unwrap();
    let left = write(&d, "l.json", r#"{"kind":"atomic","atoms":[[0.1,0.25],[0.7,0.75]]}"#);
    let right = write(&d, "r.json", r#"{"kind":"atomic","atoms":[[-0.3,0.6],[1.9,0.4]]}"#);
    for cmd in ["convolve", "bconvolve"] {
        let (p, o) = out(&d, &format!("{cmd}.json"));
        assert_eq!(run(&[cmd, "--left", &left, "--right", &right, "--out", &o]), 0);
        let text = std::fs::read_to_string(&p).unwrap();
        let parsed: MeasureJson = serde_json::from_str(&text).unwrap();
        let m = parsed.to_measure(true).unwrap();
        let again = MeasureJson::from_measure(&m);
        assert_eq!(again, parsed);
        assert_eq!(serde_json::to_string(&again).unwrap() + "\n", text);
    }
}

#[test]
fn family_and_triple_json() {
    let d = TempDir::new().unwrap();
    let m = write(&d, "s.json", r#"{"kind":"family","name":"arcsine","params":{"t":1}}"#);
    let (p, o) = out(&d, "m.json");
    assert_eq!(run(&["moments", "--measure", &m, "--order", "4", "--out", &o]), 0);
    let got: Vec<f64> = json(&p)["moments"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    // arcsine law on [-√2, √2]: m_2 = r²/2, m_4 = 3r⁴/8
    for (g, w) in got.iter().zip([1.0, 0.0, 1.0, 0.0, 1.5]) {
        assert!((g - w).abs() < 1e-12);
    }
    let (p2, o2) = out(&d, "m2.json");
    assert_eq!(run(&["moments", "--triple", "arcsine", "--t", "1", "--order", "4", "--out", &o2]), 0);
    let via_flow: Vec<f64> = json(&p2)["moments"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    for (g, w) in got.iter().zip(&via_flow) {
        assert!((g - w).abs() < 1e-12);
    }
    let bad = write(&d, "bad.json", r#"{"kind":"family","name":"arcsine","params":{"s":1}}"#);
    assert_eq!(run(&["moments", "--measure", &bad, "--order", "2"]), 2);
}

#[test]
fn checks_on_triples() {
    let d = TempDir::new().unwrap();
    let sub = write(&d, "p.json", r#"{"gamma":1,"tau":{"kind":"atomic","atoms":[[1,0.5]]}}"#);
    let weak = write(&d, "w.json", r#"{"gamma":0.4,"tau":{"kind":"atomic","atoms":[[1,0.5]]}}"#);
    let (p, o) = out(&d, "v.json");
    assert_eq!(run(&["check", "subordinator", "--triple", &sub, "--out", &o]), 0);
    assert_eq!(json(&p)["holds"], true);
    assert_eq!(run(&["check", "subordinator", "--triple", &weak, "--out", &o]), 0);
    let v = json(&p);
    assert_eq!(v["holds"], false);
    assert!(v["failing_condition"].as_str().unwrap().contains("drift"));
    assert_eq!(run(&["check", "symmetry", "--triple", "arcsine", "--out", &o]), 0);
    assert_eq!(json(&p)["holds"], true);
    assert_eq!(run(&["check", "bounded-below", "--triple", &sub, "--out", &o]), 0);
    assert_eq!(json(&p)["holds"], true);
    assert_eq!(run(&["check", "subordinator", "--triple", "arcsine", "--out", &o]), 0);
    assert_eq!(json(&p)["holds"], false);
}

#[test]
fn stable_case_and_density() {
    let d = TempDir::new().unwrap();
    let (p, o) = out(&d, "c.json");
    assert_eq!(run(&["stable", "--alpha", "0.5", "--b", "1,0", "--c", "-1,0", "--t", "0.5", "--case", "--out", &o]), 0);
    let v = json(&p);
    assert_eq!(v["case_id"], 7);
    assert!((v["atom"][0].as_f64().unwrap() + 0.75).abs() < 1e-12);
    assert!((v["atom"][1].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!(v["ac_support"][0].is_null());
    let (pd, od) = out(&d, "d.csv");
    let (_, oa) = out(&d, "a.json");
    assert_eq!(
        run(&["stable", "--alpha", "2", "--b", "-1,0", "--c", "0,0", "--t", "1", "--density", "-1,1,5", "--out", &od, "--atoms-out", &oa]),
        0
    );
    let (_, rows) = csv_columns(&pd);
    // semicircle-like closed form at the centre: √t / (π t)
    assert!((rows[2][1] - 1.0 / std::f64::consts::PI).abs() < 1e-12);
    assert_eq!(run(&["stable", "--alpha", "3", "--b", "1,0", "--t", "1", "--case"]), 2);
}

#[test]
fn bpmap_round_trip() {
    let d = TempDir::new().unwrap();
    let c = write(&d, "c.json", r#"{"gamma":0.3,"tau":{"kind":"atomic","atoms":[[-1,0.2],[2,0.5]]}}"#);
    let (p1, o1) = out(&d, "m.json");
    let (p2, o2) = out(&d, "back.json");
    assert_eq!(run(&["bpmap", "--classical", &c, "--out", &o1]), 0);
    assert_eq!(run(&["bpmap", "--classical", &o1, "--reverse", "--out", &o2]), 0);
    let triple = |p: &Path| serde_json::from_str::<TripleJson>(&std::fs::read_to_string(p).unwrap()).unwrap();
    assert_eq!(triple(&p2), triple(&p1));
    assert_eq!(triple(&p2), triple(Path::new(&c)));
}

#[test]
fn evolve_and_markov() {
    let d = TempDir::new().unwrap();
    let (p, o) = out(&d, "e.csv");
    assert_eq!(run(&["evolve", "--triple", "arcsine", "--t", "1", "--z", "0,2", "--steps", "4", "--out", &o]), 0);
    let (header, rows) = csv_columns(&p);
    assert_eq!(header, ["t", "re", "im"]);
    let last = rows.last().unwrap();
    assert!((last[0] - 1.0).abs() < 1e-15 && last[1].abs() < 1e-8 && (last[2] - 6f64.sqrt()).abs() < 1e-8);
    let (pk, ok) = out(&d, "k.csv");
    assert_eq!(run(&["markov", "--triple", "arcsine", "--t", "0.5", "--x", "0", "--grid", "-0.99,0.99,41", "--out", &ok]), 0);
    let (_, rows) = csv_columns(&pk);
    for r in rows {
        let want = 1.0 / (std::f64::consts::PI * (1.0 - r[0] * r[0]).sqrt());
        assert!((r[1] - want).abs() < 1e-3, "x={} got {} want {}", r[0], r[1], want);
    }
}

#[test]
fn exit_codes() {
    let d = TempDir::new().unwrap();
    let m = write(&d, "m.json", TWO_POINT);
    assert_eq!(run(&["convolve", "--left", "/nonexistent.json", "--right", &m]), 2);
    let bad = write(&d, "bad.json", r#"{"kind":"atomic","atoms":[[0,0.4]]}"#);
    assert_eq!(run(&["convolve", "--left", &bad, "--right", &m]), 2);
    let junk = write(&d, "junk.json", "{not json");
    assert_eq!(run(&["convolve", "--left", &junk, "--right", &m]), 2);
    assert_eq!(run(&["evolve", "--triple", "arcsine", "--t", "-1", "--z", "0,1"]), 2);
    assert_eq!(run(&["no-such-command"]), 2);
    assert_eq!(run(&["--help"]), 0);

    // the step cap is read from the environment, so use a child process
    let status = Command::new(env!("CARGO_BIN_EXE_monoconv"))
        .args(["evolve", "--triple", "arcsine", "--t", "1", "--z", "0,1"])
        .env("MONOCONV_MAX_STEPS", "2")
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(3));
}

#[test]
fn output_is_deterministic() {
    let d = TempDir::new().unwrap();
    let m = write(&d, "m.json", TWO_POINT);
    let (p1, o1) = out(&d, "a.json");
    let (p2, o2) = out(&d, "b.json");
    assert_eq!(run(&["check", "injectivity", "--measure", &m, "--out", &o1]), 0);
    assert_eq!(run(&["check", "injectivity", "--measure", &m, "--out", &o2]), 0);
    assert_eq!(std::fs::read(p1).unwrap(), std::fs::read(p2).unwrap());
}
