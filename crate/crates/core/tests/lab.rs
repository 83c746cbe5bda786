mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use common::pauli;
use hamsim_core::lab::{self, parse_spec, Format, Report, RunOptions, SweepAxis};
use hamsim_core::Error;
use sha2::{Digest, Sha256};

fn specs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../specs")
}

fn hamsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hamsim")).args(args).output().expect("hamsim runs")
}

fn spec_arg(name: &str) -> String {
    specs().join(name).to_string_lossy().into_owned()
}

const MINIMAL: &str = r#"
name = "minimal"
hamiltonian = "pauli2"
t = 0.5

[algorithm]
kind = "trotter"
"#;

#[test]
fn minimal_spec_fills_defaults() {
    let e = parse_spec(MINIMAL, Path::new(".")).unwrap();
    assert_eq!((e.order(), e.steps()), (1, 1));
    assert_eq!(e.spec.shots, 100_000);
    assert_eq!(e.spec.seed, 0);
    assert!(e.noise.is_none());
    assert!(common::max_diff(e.observable.matrix(), &pauli("ZI")) < 1e-15);
    assert!(common::max_diff(e.initial_state.matrix(), hamsim_core::channels::DensityMatrix::zero_state(2).matrix()) < 1e-15);
    assert_eq!(e.spec_sha256, hex::encode(Sha256::digest(MINIMAL.as_bytes())));
}

#[test]
fn shipped_specs_load() {
    for name in ["trotter-noisy.toml", "trotter-pec.toml", "trotter-sni.toml", "rlcu.toml"] {
        let e = lab::load_spec(&specs().join(name)).unwrap_or_else(|err| panic!("{name}: {err}"));
        assert!(e.hamiltonian.num_terms() > 0);
    }
}

#[test]
fn spec_errors_are_typed() {
    let unknown = format!("{MINIMAL}colour = \"blue\"\n");
    match parse_spec(&unknown, Path::new(".")) {
        Err(Error::Parse { line, message }) => {
            assert!(line >= 7, "line {line}");
            assert!(message.contains("colour"), "{message}");
        }
        other => panic!("{other:?}"),
    }
    let odd = MINIMAL.replace("kind = \"trotter\"", "kind = \"trotter\"\norder = 3");
    assert!(matches!(parse_spec(&odd, Path::new(".")), Err(Error::Config(_))));
    let broken = MINIMAL.replace("t = 0.5", "t = ");
    assert!(matches!(parse_spec(&broken, Path::new(".")), Err(Error::Parse { line: 4, .. })));
    let missing = MINIMAL.replace("\"pauli2\"", "\"nowhere.ham\"");
    assert!(parse_spec(&missing, Path::new(".")).is_err());
    let rlcu_with_steps = MINIMAL.replace("kind = \"trotter\"", "kind = \"rlcu\"\nsteps = 3");
    assert!(parse_spec(&rlcu_with_steps, Path::new(".")).is_err());
}

#[test]
fn exit_codes() {
    let ok = hamsim(&["simulate", "--spec", &spec_arg("trotter-noisy.toml"), "--shots", "2000"]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));

    let failing = hamsim(&["validate", "--suite", "optimizer"]);
    assert_eq!(failing.status.code(), Some(1));

    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.toml");
    std::fs::write(&bad, "name = 1\n").unwrap();
    let bad = bad.to_string_lossy().into_owned();
    for args in [
        vec!["simulate", "--spec", bad.as_str()],
        vec!["simulate"],
        vec!["validate", "--suite", "trotter-order", "--spec", bad.as_str()],
        vec!["validate", "--suite", "no-such-suite"],
    ] {
        let out = hamsim(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    }
}

#[test]
fn suite_list_names_every_suite() {
    let out = hamsim(&["validate", "--suite", "list"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for (name, _) in lab::SUITES {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name}");
    }
}

#[test]
fn out_directory_gets_report_and_timing() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().to_string_lossy().into_owned();
    let out = hamsim(&["cost", "--spec", &spec_arg("trotter-pec.toml"), "--format", "json", "--out", &dir]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = lab::load_report(&tmp.path().join("trotter-pec-cost.json")).unwrap();
    assert!(!report.records.is_empty());
    let timing = std::fs::read_to_string(tmp.path().join("trotter-pec-cost.timing")).unwrap();
    assert!(timing.starts_with("wall_seconds "));
    assert!(out.stdout.is_empty());
}

#[test]
fn simulation_output_does_not_depend_on_workers() {
    for spec in ["trotter-noisy.toml", "trotter-pec.toml", "rlcu.toml"] {
        let run = |w: &str| hamsim(&["simulate", "--spec", &spec_arg(spec), "--shots", "3000", "--format", "json", "--workers", w]);
        let (a, b) = (run("1"), run("3"));
        assert!(a.status.success() && b.status.success(), "{spec}");
        assert_eq!(a.stdout, b.stdout, "{spec}");
    }
}

#[test]
fn formats_render_consistently() {
    let e = lab::load_spec(&specs().join("trotter-noisy.toml")).unwrap();
    let report = lab::sweep(&e, None, &RunOptions { seed: None, shots: Some(500) }).unwrap();
    let rows = report.records.len();
    assert_eq!(rows, 7);

    let csv = lab::render(&report, Format::Csv).unwrap();
    let mut reader = csv::Reader::from_reader(csv.as_bytes());
    assert_eq!(reader.records().count(), rows);

    let plot = lab::render(&report, Format::Plotdata).unwrap();
    assert!(plot.starts_with('#'));
    assert_eq!(plot.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()).count(), rows);

    let json = lab::render(&report, Format::Json).unwrap();
    let back = Report::from_json(&json).unwrap();
    assert_eq!(back, report);
    assert_eq!(lab::render(&back, Format::Csv).unwrap(), csv);
}

#[test]
fn provenance_identifies_the_run() {
    let path = specs().join("trotter-noisy.toml");
    let e = lab::load_spec(&path).unwrap();
    let report = lab::simulate(&e, &RunOptions { seed: Some(99), shots: Some(200) }).unwrap();
    assert_eq!(report.provenance.seed, 99);
    assert_eq!(report.provenance.version, env!("CARGO_PKG_VERSION"));
    let digest = hex::encode(Sha256::digest(std::fs::read(&path).unwrap()));
    assert_eq!(report.provenance.spec_sha256.as_deref(), Some(digest.as_str()));

    let default_seed = lab::simulate(&e, &RunOptions { seed: None, shots: Some(200) }).unwrap();
    assert_eq!(default_seed.provenance.seed, 11);
}

#[test]
fn sweeps_cover_the_requested_axis() {
    let e = lab::load_spec(&specs().join("trotter-noisy.toml")).unwrap();
    let values: Vec<f64> = (1..=64).map(f64::from).collect();
    let report = lab::sweep(&e, Some((SweepAxis::parse("d").unwrap(), values)), &RunOptions { seed: None, shots: Some(100) }).unwrap();
    assert_eq!(report.records.len(), 64);

    assert!(lab::sweep(&e, Some((SweepAxis::parse("r").unwrap(), vec![1.0, 2.0])), &RunOptions::default()).is_err());
    assert!(SweepAxis::parse("colour").is_err());
}
