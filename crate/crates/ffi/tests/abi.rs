use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use ergodic_dirac_ffi::*;

fn last_error() -> String {
    let p = ed_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn take_string(p: *mut libc::c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { ed_string_free(p) };
    s
}

#[test]
fn clifford_signs_through_abi() {
    let expected = [
        (1, -1, 0),
        (-1, 1, -1),
        (-1, 1, 0),
        (-1, 1, 1),
        (-1, -1, 0),
        (1, 1, -1),
        (1, 1, 0),
        (1, 1, 1),
    ];
    for (n, want) in (1..=8).zip(expected) {
        let mut h = ptr::null_mut();
        assert_eq!(unsafe { ed_clifford_new(n, 1, &mut h) }, EdStatus::Ok);
        let (mut j, mut d, mut g) = (0, 0, 0);
        assert_eq!(unsafe { ed_clifford_signs(h, &mut j, &mut d, &mut g) }, EdStatus::Ok);
        assert_eq!((j, d, g), want, "n = {n}");
        assert_eq!(unsafe { ed_clifford_dim(h) }, 1 << (n / 2));
        unsafe { ed_clifford_free(h) };
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { ed_clifford_new(2, 3, &mut h) }, EdStatus::InvalidArgument);
    assert!(h.is_null());
    assert!(last_error().contains("sign"));

    assert_eq!(unsafe { ed_clifford_new(2, 1, ptr::null_mut()) }, EdStatus::NullPointer);

    let bad = CString::new("[[0, 1], [0.5, 0]]").unwrap();
    let mut t = ptr::null_mut();
    assert_eq!(
        unsafe { ed_theta_from_json(bad.as_ptr(), &mut t) },
        EdStatus::InvalidArgument
    );
    assert!(last_error().contains("antisymmetric"));

    let mut ok = ptr::null_mut();
    assert_eq!(unsafe { ed_clifford_new(3, -1, &mut ok) }, EdStatus::Ok);
    assert!(ed_last_error_message().is_null());
    unsafe { ed_clifford_free(ok) };
}

#[test]
fn torus_relation_and_cocycle() {
    let theta_entries = [0.0, 0.3, -0.3, 0.0];
    let mut theta = ptr::null_mut();
    assert_eq!(
        unsafe { ed_theta_new(2, theta_entries.as_ptr(), &mut theta) },
        EdStatus::Ok
    );

    let mut u = ptr::null_mut();
    let mut v = ptr::null_mut();
    unsafe {
        assert_eq!(ed_element_new(2, &mut u), EdStatus::Ok);
        assert_eq!(ed_element_new(2, &mut v), EdStatus::Ok);
        assert_eq!(ed_element_add_term(u, [1i64, 0].as_ptr(), 2, 1.0, 0.0), EdStatus::Ok);
        assert_eq!(ed_element_add_term(v, [0i64, 1].as_ptr(), 2, 1.0, 0.0), EdStatus::Ok);
        assert_eq!(
            ed_element_add_term(v, [0i64].as_ptr(), 1, 1.0, 0.0),
            EdStatus::DimensionMismatch
        );
    }

    let (mut uv, mut vu) = (ptr::null_mut(), ptr::null_mut());
    unsafe {
        assert_eq!(ed_element_multiply(u, v, theta, &mut uv), EdStatus::Ok);
        assert_eq!(ed_element_multiply(v, u, theta, &mut vu), EdStatus::Ok);
    }
    // U V = e^{2πiθ} V U
    let (mut re1, mut im1, mut re2, mut im2) = (0.0, 0.0, 0.0, 0.0);
    unsafe {
        assert_eq!(
            ed_element_coeff(uv, [1i64, 1].as_ptr(), 2, &mut re1, &mut im1),
            EdStatus::Ok
        );
        assert_eq!(
            ed_element_coeff(vu, [1i64, 1].as_ptr(), 2, &mut re2, &mut im2),
            EdStatus::Ok
        );
    }
    let phase = num_phase(re1, im1) - num_phase(re2, im2);
    let want = 2.0 * std::f64::consts::PI * 0.3;
    assert!(
        ((phase - want).rem_euclid(2.0 * std::f64::consts::PI))
            .min((want - phase).rem_euclid(2.0 * std::f64::consts::PI))
            < 1e-12
    );

    let mut uv_star = ptr::null_mut();
    let (mut re, mut im) = (0.0, 0.0);
    unsafe {
        assert_eq!(ed_element_adjoint(uv, theta, &mut uv_star), EdStatus::Ok);
        assert_eq!(
            ed_cyclic_cocycle_2d(uv_star, u, v, theta, &mut re, &mut im),
            EdStatus::Ok
        );
    }
    let four_pi_sq = 4.0 * std::f64::consts::PI * std::f64::consts::PI;
    assert!((re + four_pi_sq).abs() < 1e-9 && im.abs() < 1e-9, "{re} {im}");

    let mut json = ptr::null_mut();
    assert_eq!(unsafe { ed_element_to_json(u, &mut json) }, EdStatus::Ok);
    assert!(take_string(json).contains("\"terms\""));

    unsafe {
        for h in [u, v, uv, vu, uv_star] {
            ed_element_free(h);
        }
        ed_theta_free(theta);
    }
}

fn num_phase(re: f64, im: f64) -> f64 {
    im.atan2(re)
}

#[test]
fn dirac_spectrum_and_summability() {
    let mut cliff = ptr::null_mut();
    assert_eq!(unsafe { ed_clifford_new(2, 1, &mut cliff) }, EdStatus::Ok);

    let mut d = ptr::null_mut();
    let active = [0usize];
    assert_eq!(
        unsafe { ed_dirac_new(cliff, 2, 5, active.as_ptr(), 1, &mut d) },
        EdStatus::Ok
    );
    assert_eq!(unsafe { ed_dirac_dim(d) }, 2 * 11 * 11);
    let mut spec = ptr::null_mut();
    assert_eq!(unsafe { ed_dirac_spectrum(d, &mut spec) }, EdStatus::Ok);
    assert_eq!(unsafe { ed_spectrum_kernel_multiplicity(spec) }, 2 * 11);
    unsafe {
        ed_spectrum_free(spec);
        ed_dirac_free(d);
    }

    let all = [0usize, 1];
    assert_eq!(
        unsafe { ed_dirac_new(cliff, 2, 30, all.as_ptr(), 2, &mut d) },
        EdStatus::Ok
    );
    assert_eq!(unsafe { ed_dirac_spectrum(d, &mut spec) }, EdStatus::Ok);
    let (mut value, mut mult) = (0.0, 0usize);
    let len = unsafe { ed_spectrum_len(spec) };
    assert!(len > 0);
    assert_eq!(
        unsafe { ed_spectrum_get(spec, len, &mut value, &mut mult) },
        EdStatus::OutOfRange
    );
    assert_eq!(
        unsafe { ed_spectrum_get(spec, len / 2, &mut value, &mut mult) },
        EdStatus::Ok
    );
    assert!(value.abs() < 1e-9 && mult == 2);

    let (mut spread, mut verdict) = (0.0, -1);
    assert_eq!(
        unsafe { ed_spectrum_summability(spec, 2, &mut spread, &mut verdict) },
        EdStatus::Ok
    );
    assert_eq!(verdict, ED_VERDICT_PLATEAU);
    assert!(spread < 0.25);
    assert_eq!(
        unsafe { ed_spectrum_summability(spec, 1, &mut spread, &mut verdict) },
        EdStatus::Ok
    );
    assert_eq!(verdict, ED_VERDICT_GROWING);

    let mut csv = ptr::null_mut();
    assert_eq!(unsafe { ed_spectrum_to_csv(spec, &mut csv) }, EdStatus::Ok);
    assert!(take_string(csv).starts_with("value,multiplicity\n"));

    unsafe {
        ed_spectrum_free(spec);
        ed_dirac_free(d);
        ed_clifford_free(cliff);
    }
}

#[test]
fn free_functions_accept_null() {
    unsafe {
        ed_clifford_free(ptr::null_mut());
        ed_theta_free(ptr::null_mut());
        ed_element_free(ptr::null_mut());
        ed_dirac_free(ptr::null_mut());
        ed_spectrum_free(ptr::null_mut());
        ed_string_free(ptr::null_mut());
    }
    assert_eq!(unsafe { ed_clifford_dim(ptr::null()) }, 0);
    assert_eq!(unsafe { ed_spectrum_len(ptr::null()) }, 0);
}

fn header_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("include")
        .join("ergodic_dirac.h")
}

#[test]
fn header_declares_the_exported_surface() {
    let header = std::fs::read_to_string(header_path()).expect("generated header");
    for sym in [
        "ed_last_error_message",
        "ed_string_free",
        "ed_clifford_new",
        "ed_clifford_signs",
        "ed_theta_new",
        "ed_theta_from_json",
        "ed_element_multiply",
        "ed_cyclic_cocycle_2d",
        "ed_dirac_new",
        "ed_dirac_spectrum",
        "ed_spectrum_get",
        "ed_spectrum_summability",
        "typedef struct EdClifford EdClifford;",
        "ED_STATUS_OK = 0",
        "ED_STATUS_PANIC = 13",
    ] {
        assert!(header.contains(sym), "header lacks {sym}");
    }
}

/// Compiles and runs a small C program against the header and static library.
#[test]
fn c_program_links_against_static_library() {
    let deps_dir = std::env::current_exe().unwrap().parent().unwrap().to_path_buf();
    let profile_dir = deps_dir.parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libergodic_dirac_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());

    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    std::fs::write(
        &src,
        r#"
#include <stdio.h>
#include "ergodic_dirac.h"

int main(void) {
    EdClifford *c = NULL;
    if (ed_clifford_new(4, 1, &c) != ED_STATUS_OK) return 10;
    int j = 0, d = 0, g = 0;
    if (ed_clifford_signs(c, &j, &d, &g) != ED_STATUS_OK) return 11;
    if (j != -1 || d != 1 || g != 1) return 12;
    ed_clifford_free(c);
    c = NULL;
    size_t active[2] = {0, 1};
    EdClifford *c2 = NULL;
    if (ed_clifford_new(2, 1, &c2) != ED_STATUS_OK) return 13;
    EdDirac *op = NULL;
    if (ed_dirac_new(c2, 2, 3, active, 2, &op) != ED_STATUS_OK) return 14;
    EdSpectrum *s = NULL;
    if (ed_dirac_spectrum(op, &s) != ED_STATUS_OK) return 15;
    if (ed_spectrum_kernel_multiplicity(s) != 2) return 16;
    if (ed_clifford_new(0, 1, &c) == ED_STATUS_OK) return 17;
    if (ed_last_error_message() == NULL) return 18;
    ed_spectrum_free(s);
    ed_dirac_free(op);
    ed_clifford_free(c2);
    printf("ok\n");
    return 0;
}
"#,
    )
    .unwrap();
    let exe = dir.path().join("smoke");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(header_path().parent().unwrap())
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler available");
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&exe).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "smoke program exit {:?}", out.status);
    assert_eq!(String::from_utf8_lossy(&out.stdout), "ok\n");
}
