use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use lcdrive_ffi::*;

fn last_error() -> String {
    let p = lcd_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn spec(kind: LcdKind, sites: u32, h_xf: f64) -> LcdSpec {
    let mut s = std::mem::MaybeUninit::<LcdSpec>::uninit();
    assert_eq!(unsafe { lcd_spec_default(kind, sites, h_xf, s.as_mut_ptr()) }, LcdStatus::Ok);
    unsafe { s.assume_init() }
}

#[test]
fn run_matches_rust_api() {
    let mut s = spec(LcdKind::Lcdlu, 4, 0.5);
    s.lambda_f = 3.0;
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { lcd_run(&s, &mut r) }, LcdStatus::Ok);
    let (mut f, mut pre) = (0.0, 0.0);
    assert_eq!(
        unsafe { lcd_run_result_summary(r, &mut f, &mut pre, ptr::null_mut(), ptr::null_mut()) },
        LcdStatus::Ok
    );
    let native = lcdrive::protocols::run(
        &lcdrive::protocols::ProtocolSpec::new(4, 0.5, lcdrive::protocols::ProtocolKind::Lcdlu).with_lambda_f(3.0),
    )
    .unwrap();
    assert_eq!(f, native.final_fidelity);
    assert_eq!(pre, native.pre_lu_fidelity);
    assert!(f > pre);

    let n = unsafe { lcd_run_result_len(r) };
    assert_eq!(n, 201);
    let (mut t, mut fid) = (vec![0.0; n], vec![0.0; n]);
    assert_eq!(
        unsafe { lcd_run_result_trajectory(r, t.as_mut_ptr(), fid.as_mut_ptr(), n) },
        LcdStatus::Ok
    );
    assert_eq!(t[n - 1], 1.0);
    assert_eq!(fid[n - 1], pre);
    assert_eq!(
        unsafe { lcd_run_result_trajectory(r, t.as_mut_ptr(), fid.as_mut_ptr(), n - 1) },
        LcdStatus::InvalidArgument
    );

    let mut amps = vec![0.0; 32];
    assert_eq!(unsafe { lcd_run_result_state(r, amps.as_mut_ptr(), 32) }, LcdStatus::Ok);
    let norm: f64 = amps.iter().map(|x| x * x).sum();
    assert!((norm - 1.0).abs() < 1e-9);
    unsafe { lcd_run_result_free(r) };
}

#[test]
fn invalid_spec_reports_message() {
    let s = spec(LcdKind::Lcd, 1, 2.0);
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { lcd_run(&s, &mut r) }, LcdStatus::InvalidArgument);
    assert!(r.is_null());
    assert!(last_error().contains("L = 1"));
    assert_eq!(unsafe { lcd_run(ptr::null(), &mut r) }, LcdStatus::NullPointer);
}

#[test]
fn pauli_sum_ground_energy() {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { lcd_pauli_sum_new(2, &mut h) }, LcdStatus::Ok);
    for (p, c) in [("ZZ", 1.0), ("XI", 1.0), ("IX", 1.0)] {
        let p = CString::new(p).unwrap();
        assert_eq!(unsafe { lcd_pauli_sum_add_term(h, p.as_ptr(), c, 0.0) }, LcdStatus::Ok);
    }
    assert_eq!(unsafe { lcd_pauli_sum_num_terms(h) }, 3);
    let mut e = 0.0;
    assert_eq!(unsafe { lcd_pauli_sum_ground_energy(h, &mut e) }, LcdStatus::Ok);
    // ZZ + X1 + X2 on two sites: lowest level −√5.
    assert!((e + 5f64.sqrt()).abs() < 1e-10);
    let bad = CString::new("XQ").unwrap();
    assert_eq!(unsafe { lcd_pauli_sum_add_term(h, bad.as_ptr(), 1.0, 0.0) }, LcdStatus::InvalidArgument);
    let long = CString::new("XXX").unwrap();
    assert_ne!(unsafe { lcd_pauli_sum_add_term(h, long.as_ptr(), 1.0, 0.0) }, LcdStatus::Ok);
    unsafe { lcd_pauli_sum_free(h) };
    unsafe { lcd_pauli_sum_free(ptr::null_mut()) };
}

#[test]
fn protocol_hamiltonian_terms() {
    let s = spec(LcdKind::Lcd, 3, 2.0);
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { lcd_protocol_hamiltonian(&s, 0.5, &mut h) }, LcdStatus::Ok);
    // Z, X and Y on each site plus three bonds.
    assert_eq!(unsafe { lcd_pauli_sum_num_terms(h) }, 12);
    unsafe { lcd_pauli_sum_free(h) };
}

#[test]
fn circuit_round_trip_and_sampling() {
    let mut s = spec(LcdKind::Lcd, 4, 2.0);
    assert_eq!(unsafe { lcd_theory_lambda_f(&s, &mut s.lambda_f) }, LcdStatus::Ok);
    assert!((s.lambda_f - 1.5f64.sqrt()).abs() < 1e-8);
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { lcd_circuit_synthesize(&s, 20, &mut c) }, LcdStatus::Ok);
    let (mut one, mut two) = (0usize, 0usize);
    assert_eq!(unsafe { lcd_circuit_gate_counts(c, &mut one, &mut two) }, LcdStatus::Ok);
    assert_eq!((one, two), (240, 80));

    let mut text = ptr::null_mut();
    assert_eq!(unsafe { lcd_circuit_to_qasm(c, &mut text) }, LcdStatus::Ok);
    let mut back = ptr::null_mut();
    assert_eq!(unsafe { lcd_circuit_from_qasm(text, &mut back) }, LcdStatus::Ok);
    let (mut one2, mut two2) = (0usize, 0usize);
    unsafe { lcd_circuit_gate_counts(back, &mut one2, &mut two2) };
    assert_eq!((one2, two2), (one, two));
    unsafe { lcd_string_free(text) };

    let (mut e1, mut se1, mut e2, mut se2) = (0.0, 0.0, 0.0, 0.0);
    unsafe {
        assert_eq!(lcd_circuit_sample_energy(c, 2.0, 1.0, LcdBoundary::Auto, 1000, 5, &mut e1, &mut se1), LcdStatus::Ok);
        assert_eq!(lcd_circuit_sample_energy(back, 2.0, 1.0, LcdBoundary::Auto, 1000, 5, &mut e2, &mut se2), LcdStatus::Ok);
    }
    assert_eq!(e1, e2);
    assert!(se1 > 0.0 && e1 < 0.0);
    unsafe {
        assert_eq!(
            lcd_circuit_sample_energy(c, 2.0, 1.0, LcdBoundary::Auto, 0, 5, &mut e1, &mut se1),
            LcdStatus::InvalidArgument
        );
        lcd_circuit_free(c);
        lcd_circuit_free(back);
    }

    let junk = CString::new("OPENQASM 2.0;\nqreg q[2];\ncx q[0],q[1];\n").unwrap();
    let mut bad = ptr::null_mut();
    assert_ne!(unsafe { lcd_circuit_from_qasm(junk.as_ptr(), &mut bad) }, LcdStatus::Ok);
    assert!(!last_error().is_empty());
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(lcd_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/lcdrive.h");
    assert!(std::path::Path::new(header).exists(), "build script did not write the header");
    let Ok(status) = Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c", header])
        .status()
    else {
        eprintln!("no C compiler available; skipping");
        return;
    };
    assert!(status.success());
}

#[test]
fn c_program_links_against_staticlib() {
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|d| d.parent()).unwrap();
    let lib = profile_dir.join("liblcdrive_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built; skipping", lib.display());
        return;
    }
    let dir = tempfile_dir();
    let bin = dir.join("smoke");
    let src = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/c/smoke.c");
    let inc = concat!(env!("CARGO_MANIFEST_DIR"), "/include");
    let Ok(status) = Command::new("cc")
        .arg(src)
        .arg(format!("-I{inc}"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&bin)
        .status()
    else {
        eprintln!("no C compiler available; skipping");
        return;
    };
    assert!(status.success(), "C smoke program failed to build");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("F=0.9"));
}

fn tempfile_dir() -> std::path::PathBuf {
    let d = std::env::temp_dir().join(format!("lcdrive-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}
