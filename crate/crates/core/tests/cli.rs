use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use srv_bv::io::{parse_curve, ResultFile};
use srv_bv::oracle::brute_force_match;
use srv_bv::AcCurve;

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_srv-bv"))
        .args(args)
        .output()
        .unwrap()
}

fn result(args: &[&str]) -> ResultFile {
    let out = run(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    ResultFile::parse(&String::from_utf8(out.stdout).unwrap()).unwrap()
}

fn tmp(dir: &tempfile::TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

#[test]
fn validate_exit_codes() {
    assert_eq!(run(&["validate", &fixture("step.json")]).status.code(), Some(0));
    let bad = run(&["validate", &fixture("bad_order.json")]);
    assert_eq!(bad.status.code(), Some(1));
    let text = String::from_utf8(bad.stdout).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("node 2:"));
    assert_eq!(run(&["validate", "/nonexistent/curve.json"]).status.code(), Some(2));
}

#[test]
fn distance_modes() {
    let r = result(&["distance", &fixture("step.json"), &fixture("step.json")]);
    assert_eq!(r.outputs["distance"], 0.0);

    let r = result(&[
        "distance",
        &fixture("segment.json"),
        &fixture("segment_up.json"),
        "--mode",
        "param",
    ]);
    assert!((r.outputs["distance"] - 2f64.sqrt()).abs() < 1e-12);
    assert_eq!(r.inputs.len(), 2);
    assert_eq!(r.inputs[0].sha256.len(), 64);

    let r = result(&["distance", &fixture("step.json"), &fixture("step_anti.json")]);
    assert_eq!(r.outputs["distance_squared"], 2.0);

    let r = result(&[
        "distance",
        &fixture("segment.json"),
        &fixture("segment_up.json"),
        "--mode",
        "scale",
    ]);
    assert!((r.outputs["distance"] - std::f64::consts::FRAC_PI_2).abs() < 1e-12);

    let jump = run(&[
        "distance",
        &fixture("step.json"),
        &fixture("segment.json"),
        "--mode",
        "param",
    ]);
    assert_eq!(jump.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&jump.stderr).contains("use --mode relaxed"));
}

#[test]
fn shape_examples() {
    let r = result(&["shape", &fixture("step_03.json"), &fixture("step_07.json")]);
    assert!(r.outputs["d_shape"] < 1e-6);
    for key in ["psi1", "psi2", "phi1", "phi2"] {
        let k = &r.knots[key];
        assert_eq!(k.first(), Some(&(0.0, 0.0)));
        assert_eq!(k.last(), Some(&(1.0, 1.0)));
    }

    let r = result(&["shape", &fixture("segment.json"), &fixture("segment_slow_start.json")]);
    assert!(r.outputs["d_shape"] < 1e-6);

    let r = result(&["shape", &fixture("lshape.json"), &fixture("segment.json")]);
    let l = AcCurve::try_from(parse_curve(&std::fs::read_to_string(fixture("lshape.json")).unwrap()).unwrap())
        .unwrap();
    let e = AcCurve::uniform(&[vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
    assert_eq!(r.outputs["s_star"], brute_force_match(&l, &e, 5, 5).unwrap());
    assert_eq!(r.correspondences.len(), 21);
}

#[test]
fn gtransform_outputs() {
    let r = result(&["gtransform", &fixture("step.json")]);
    let g = r.curve.unwrap().to_curve().unwrap();
    assert_eq!(g.params(), vec![0.0, 0.25, 0.75, 1.0]);
    assert_eq!(r.outputs["alpha"], 0.5);

    let r = result(&["gtransform", &fixture("lshape.json")]);
    let original = parse_curve(&std::fs::read_to_string(fixture("lshape.json")).unwrap()).unwrap();
    assert_eq!(r.curve.unwrap().to_curve().unwrap(), original);
    assert_eq!(r.outputs["alpha"], 0.0);

    let r = result(&["gtransform", &fixture("ramp_step.json")]);
    assert_eq!(r.outputs["alpha"], 0.25);
}

#[test]
fn approx_check() {
    let r = result(&["approx-check", &fixture("step.json"), &fixture("step.json")]);
    assert_eq!(r.outputs["final_gap"], 0.0);
    assert_eq!(r.series["s_values"].len(), 4);
    let r = result(&[
        "approx-check",
        &fixture("step.json"),
        &fixture("ramp_step.json"),
        "--eps",
        "0.1,0.01",
    ]);
    assert_eq!(r.outputs["passed"], 1.0);
    let big = run(&["approx-check", &fixture("step.json"), &fixture("step.json"), "--eps", "0.3"]);
    assert_eq!(big.status.code(), Some(1));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = tmp(&dir, "d.json");
    let o = run(&[
        "distance",
        &fixture("step.json"),
        &fixture("segment.json"),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let r = ResultFile::parse(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r.command[0], "distance");
}

#[test]
fn plots() {
    let dir = tempfile::tempdir().unwrap();
    let svg = |name: &str| tmp(&dir, name).display().to_string();

    assert_eq!(run(&["plot", &fixture("segment.json"), "--svg", &svg("s.svg")]).status.code(), Some(0));
    let text = std::fs::read_to_string(svg("s.svg")).unwrap();
    assert_eq!(text.matches("<polyline").count(), 1);

    assert_eq!(run(&["plot", &fixture("step.json"), "--svg", &svg("j.svg")]).status.code(), Some(0));
    let text = std::fs::read_to_string(svg("j.svg")).unwrap();
    assert_eq!(text.matches("class=\"jump\"").count(), 1);

    let m = svg("m.json");
    let o = run(&[
        "shape",
        &fixture("step.json"),
        &fixture("segment.json"),
        "--samples",
        "13",
        "--out",
        &m,
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&[
        "plot",
        &fixture("step.json"),
        &fixture("segment.json"),
        "--match",
        &m,
        "--svg",
        &svg("o.svg"),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(svg("o.svg")).unwrap();
    assert_eq!(text.matches("class=\"chord\"").count(), 13);
    assert_eq!(text.matches("class=\"curve2\"").count(), 1);

    assert_eq!(run(&["plot", &fixture("line1d.json"), "--svg", &svg("l.svg")]).status.code(), Some(1));
    assert_eq!(
        run(&["plot", &fixture("line1d.json"), "--profile", "--svg", &svg("l.svg")]).status.code(),
        Some(0)
    );
}
