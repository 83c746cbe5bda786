use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use hamsim_ffi::*;

fn last_error() -> String {
    let p = hamsim_last_error();
    assert!(!p.is_null(), "expected an error message");
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn parse(text: &str) -> (HamsimStatus, *mut HamsimHamiltonian) {
    let c = CString::new(text).unwrap();
    let mut h = ptr::null_mut();
    let s = unsafe { hamsim_hamiltonian_parse(c.as_ptr(), &mut h) };
    (s, h)
}

#[test]
fn hamiltonian_handle_round_trip() {
    let (s, h) = parse("1.0 XI\n1.0 ZZ\n");
    assert_eq!(s, HamsimStatus::Ok);
    assert!(hamsim_last_error().is_null());
    unsafe {
        assert_eq!(hamsim_hamiltonian_num_terms(h), 2);
        assert_eq!(hamsim_hamiltonian_num_qubits(h), 2);
        let mut v = 0.0;
        assert_eq!(hamsim_hamiltonian_beta(h, &mut v), HamsimStatus::Ok);
        assert_eq!(v, 2.0);
        assert_eq!(hamsim_hamiltonian_alpha_comm(h, 1, &mut v), HamsimStatus::Ok);
        assert!((v - 4.0).abs() < 1e-12);
        assert_eq!(hamsim_hamiltonian_c1(h, 1, &mut v), HamsimStatus::Ok);
        assert!((v - 1.0).abs() < 1e-10);
        hamsim_hamiltonian_free(h);
    }
}

#[test]
fn errors_map_to_codes_and_messages() {
    let (s, h) = parse("1.0 XQ\n");
    assert_eq!(s, HamsimStatus::Parse);
    assert!(h.is_null());
    assert!(last_error().contains("line 1"));

    let (s, _) = parse("1.0 XI\n1.0 ZZZ\n");
    assert_ne!(s, HamsimStatus::Ok);

    let mut out = ptr::null_mut();
    assert_eq!(unsafe { hamsim_hamiltonian_parse(ptr::null(), &mut out) }, HamsimStatus::NullPointer);

    let mut v = 0.0;
    assert_eq!(unsafe { hamsim_hamiltonian_beta(ptr::null(), &mut v) }, HamsimStatus::NullPointer);
    assert_eq!(unsafe { hamsim_hamiltonian_num_terms(ptr::null()) }, 0);

    let (_, h) = parse("1.0 XI\n1.0 ZZ\n");
    assert_eq!(unsafe { hamsim_hamiltonian_alpha_comm(h, 3, &mut v) }, HamsimStatus::InvalidArgument);
    unsafe { hamsim_hamiltonian_free(h) };

    let bytes = [0xffu8, 0xfe, 0];
    assert_eq!(unsafe { hamsim_hamiltonian_parse(bytes.as_ptr().cast(), &mut out) }, HamsimStatus::InvalidUtf8);

    // freeing NULL is a no-op
    unsafe {
        hamsim_hamiltonian_free(ptr::null_mut());
        hamsim_report_free(ptr::null_mut());
        hamsim_experiment_free(ptr::null_mut());
        hamsim_string_free(ptr::null_mut());
    }
}

#[test]
fn trotter_cost_matches_core() {
    let inputs = HamsimTrotterCost { alpha_k: 1.0, order: 1, num_terms: 2.0, gamma: 0.01, gamma_prime: 0.02 };
    let mut out = std::mem::MaybeUninit::<HamsimTrotterCostResult>::uninit();
    assert_eq!(unsafe { hamsim_trotter_cost(&inputs, 1e-3, out.as_mut_ptr()) }, HamsimStatus::Ok);
    let out = unsafe { out.assume_init() };

    let p = hamsim_core::cost::TrotterCostInputs::new(1.0, 1, 2.0, 0.01, 0.02).unwrap();
    let r = hamsim_core::cost::trotter_report(&p, 1e-3, None).unwrap();
    assert_eq!(out.samples, r.m);
    assert_eq!(out.depth, r.d_star.unwrap());
    assert_eq!(out.regime, HamsimRegime::BelowCritical);

    let bad = HamsimTrotterCost { gamma: -1.0, ..inputs };
    let mut out = std::mem::MaybeUninit::<HamsimTrotterCostResult>::uninit();
    assert_eq!(unsafe { hamsim_trotter_cost(&bad, 1e-3, out.as_mut_ptr()) }, HamsimStatus::InvalidArgument);
}

const SPEC: &str = r#"
name = "ffi"
hamiltonian = "pauli2"
t = 0.5
shots = 2000
seed = 5

[algorithm]
kind = "trotter"
order = 1
steps = 4

[noise]
gamma = 0.01

[cost]
epsilon = 0.01

[sweep]
axis = "N"
values = [1, 2]
"#;

fn experiment(text: &str) -> (HamsimStatus, *mut HamsimExperiment) {
    let c = CString::new(text).unwrap();
    let mut e = ptr::null_mut();
    let s = unsafe { hamsim_experiment_parse(c.as_ptr(), ptr::null(), &mut e) };
    (s, e)
}

fn render(r: *const HamsimReport, f: HamsimFormat) -> String {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { hamsim_report_render(r, f, &mut s) }, HamsimStatus::Ok);
    let text = unsafe { CStr::from_ptr(s) }.to_string_lossy().into_owned();
    unsafe { hamsim_string_free(s) };
    text
}

#[test]
fn experiment_reports() {
    let (s, e) = experiment(SPEC);
    assert_eq!(s, HamsimStatus::Ok);
    unsafe {
        let mut r = ptr::null_mut();
        assert_eq!(hamsim_simulate(e, ptr::null(), &mut r), HamsimStatus::Ok);
        assert_eq!(hamsim_report_num_records(r), 1);
        assert_eq!(hamsim_report_passed(r), 1);
        let mut shots = 0.0;
        let key = CString::new("shots").unwrap();
        assert_eq!(hamsim_report_value(r, 0, key.as_ptr(), &mut shots), HamsimStatus::Ok);
        assert_eq!(shots, 2000.0);
        let missing = CString::new("nope").unwrap();
        assert_eq!(hamsim_report_value(r, 0, missing.as_ptr(), &mut shots), HamsimStatus::InvalidArgument);
        assert_eq!(hamsim_report_value(r, 7, key.as_ptr(), &mut shots), HamsimStatus::OutOfRange);
        let first = render(r, HamsimFormat::Json);
        hamsim_report_free(r);

        // same seed override reproduces the report exactly
        let opts = HamsimRunOptions { has_seed: 1, seed: 5, shots: 0 };
        let mut r = ptr::null_mut();
        assert_eq!(hamsim_simulate(e, &opts, &mut r), HamsimStatus::Ok);
        assert_eq!(render(r, HamsimFormat::Json), first);
        hamsim_report_free(r);

        let mut r = ptr::null_mut();
        assert_eq!(hamsim_sweep(e, ptr::null(), &mut r), HamsimStatus::Ok);
        assert_eq!(hamsim_report_num_records(r), 2);
        assert!(render(r, HamsimFormat::Csv).starts_with("suite,label"));
        hamsim_report_free(r);

        let mut r = ptr::null_mut();
        assert_eq!(hamsim_cost(e, ptr::null(), &mut r), HamsimStatus::Ok);
        assert_eq!(hamsim_report_num_records(r), 1);
        hamsim_report_free(r);
        hamsim_experiment_free(e);
    }
    assert_eq!(unsafe { hamsim_report_passed(ptr::null()) }, -1);
}

#[test]
fn spec_errors() {
    let (s, e) = experiment("name = 1\n");
    assert_ne!(s, HamsimStatus::Ok);
    assert!(e.is_null());
    let (s, _) = experiment(&SPEC.replace("order = 1", "order = 3"));
    assert_eq!(s, HamsimStatus::Config);
    assert!(!last_error().is_empty());

    let path = CString::new("/nonexistent/spec.toml").unwrap();
    let mut e = ptr::null_mut();
    assert_eq!(unsafe { hamsim_experiment_load(path.as_ptr(), &mut e) }, HamsimStatus::Io);

    let suites = CString::new("no-such-suite").unwrap();
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { hamsim_validate(suites.as_ptr(), 0, 0, &mut r) }, HamsimStatus::Config);
    assert!(last_error().contains("trotter-order"));
}

#[test]
fn validate_runs_a_suite() {
    let suites = CString::new("trotter-order").unwrap();
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { hamsim_validate(suites.as_ptr(), 0, 0, &mut r) }, HamsimStatus::Ok);
    assert_eq!(unsafe { hamsim_report_passed(r) }, 1);
    unsafe { hamsim_report_free(r) };
}

#[test]
fn version_is_the_crate_version() {
    let v = unsafe { CStr::from_ptr(hamsim_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn have_cc() -> bool {
    Command::new("cc").arg("--version").output().is_ok()
}

#[test]
fn header_compiles_as_c_and_cxx() {
    if !have_cc() {
        eprintln!("no C compiler; skipping");
        return;
    }
    let include = crate_dir().join("include");
    let header = include.join("hamsim.h");
    for (lang, std) in [("c", "-std=c99"), ("c++", "-std=c++11")] {
        let out = Command::new("cc")
            .args(["-fsyntax-only", "-Wall", "-Werror", std, "-x", lang])
            .arg(&header)
            .output()
            .unwrap();
        assert!(out.status.success(), "{lang}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn c_program_links_against_the_static_library() {
    if !have_cc() {
        eprintln!("no C compiler; skipping");
        return;
    }
    // target/<profile>/deps/<this test> -> target/<profile>
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libhamsim_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built; skipping", lib.display());
        return;
    }
    let exe = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("hamsim_cost_demo");
    let out = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-I"])
        .arg(crate_dir().join("include"))
        .arg(crate_dir().join("examples/cost.c"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success());
    let text = String::from_utf8_lossy(&run.stdout);
    assert!(text.contains("terms=2 qubits=2 c1=1.000000 alpha1=4.000000"), "{text}");
    assert!(text.contains("regime=0"), "{text}");
    assert!(text.contains(&format!("bad status={}", HamsimStatus::Parse as i32)), "{text}");
}
