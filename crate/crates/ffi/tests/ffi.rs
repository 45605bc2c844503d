use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use bic_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(bic_last_error()) }.to_string_lossy().into_owned()
}

fn r(num: i64, den: i64) -> BicRational {
    BicRational { num, den }
}

#[test]
fn toy_region() {
    let mut region = ptr::null_mut();
    let status = unsafe { bic_region_compute(BicSetup::R0RL, 2, 1, 1, 1, &mut region) };
    assert_eq!(status, BicStatus::Ok);

    let mut verdict = BicVerdict::Gap;
    assert_eq!(unsafe { bic_region_verdict(region, &mut verdict) }, BicStatus::Ok);
    assert_eq!(verdict, BicVerdict::TightProven);

    let count = unsafe { bic_region_corner_count(region) };
    let mut corners = Vec::new();
    for i in 0..count {
        let mut p = BicPoint { x: r(0, 1), y: r(0, 1) };
        assert_eq!(unsafe { bic_region_corner(region, i, &mut p) }, BicStatus::Ok);
        corners.push(p);
    }
    corners.sort_by_key(|p| (p.x.num, p.y.num));
    assert_eq!(
        corners,
        [BicPoint { x: r(0, 1), y: r(2, 1) }, BicPoint { x: r(1, 1), y: r(0, 1) }]
    );

    let mut p = BicPoint { x: r(0, 1), y: r(0, 1) };
    assert_eq!(unsafe { bic_region_corner(region, count, &mut p) }, BicStatus::InvalidArgument);
    assert!(last_error().contains("out of range"));

    let json = unsafe { bic_region_to_json(region, true) };
    assert!(!json.is_null());
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_owned();
    unsafe { bic_string_free(json) };
    assert!(text.contains("\"verdict\": \"tight_proven\""));

    unsafe { bic_region_free(region) };
}

#[test]
fn conjecture_verdict() {
    let mut region = ptr::null_mut();
    assert_eq!(unsafe { bic_region_compute(BicSetup::RLRM, 4, 3, 2, 2, &mut region) }, BicStatus::Ok);
    let mut verdict = BicVerdict::Gap;
    unsafe { bic_region_verdict(region, &mut verdict) };
    assert_eq!(verdict, BicVerdict::TightIfConjecture);
    unsafe { bic_region_free(region) };
}

#[test]
fn invalid_region_arguments() {
    let mut region = ptr::null_mut();
    let status = unsafe { bic_region_compute(BicSetup::R0RL, 2, 3, 1, 1, &mut region) };
    assert_eq!(status, BicStatus::InvalidArgument);
    assert!(region.is_null());
    assert!(!last_error().is_empty());

    let status = unsafe { bic_region_compute(BicSetup::R0RL, 2, 1, 1, 1, ptr::null_mut()) };
    assert_eq!(status, BicStatus::NullPointer);
    assert_eq!(unsafe { bic_region_corner_count(ptr::null()) }, 0);
    assert!(unsafe { bic_region_to_json(ptr::null(), false) }.is_null());
}

#[test]
fn scheme_round_trip() {
    let name = CString::new("erasure-all").unwrap();
    let mut scheme = ptr::null_mut();
    let status = unsafe { bic_scheme_build(BicSetup::R0RL, name.as_ptr(), 4, 2, 2, 1, 8, 0, &mut scheme) };
    assert_eq!(status, BicStatus::Ok, "{}", last_error());

    let mut passed = false;
    assert_eq!(unsafe { bic_scheme_verify(scheme, &mut passed) }, BicStatus::Ok);
    assert!(passed);

    let mut rate = BicPoint { x: r(0, 1), y: r(0, 1) };
    assert_eq!(unsafe { bic_scheme_rate(scheme, BicSetup::R0RL, &mut rate) }, BicStatus::Ok);
    // (M - L·alpha, 0) with M=4, L=2, alpha=1/2.
    assert_eq!(rate, BicPoint { x: r(3, 1), y: r(0, 1) });

    let text = unsafe { bic_scheme_serialize(scheme) };
    let mut again = ptr::null_mut();
    assert_eq!(unsafe { bic_scheme_parse(text, &mut again) }, BicStatus::Ok);
    let mut passed = false;
    unsafe { bic_scheme_verify(again, &mut passed) };
    assert!(passed);

    unsafe {
        bic_string_free(text);
        bic_scheme_free(scheme);
        bic_scheme_free(again);
    }
}

#[test]
fn scheme_errors() {
    let bad = CString::new("no-such-corner").unwrap();
    let mut scheme = ptr::null_mut();
    let status = unsafe { bic_scheme_build(BicSetup::R0RL, bad.as_ptr(), 4, 2, 2, 1, 8, 0, &mut scheme) };
    assert_eq!(status, BicStatus::InvalidArgument);
    assert!(last_error().contains("unknown corner"));

    // Alignment needs 1/2 <= alpha <= 2/3.
    let name = CString::new("alignment").unwrap();
    let status = unsafe { bic_scheme_build(BicSetup::R0RL, name.as_ptr(), 3, 1, 4, 1, 8, 0, &mut scheme) };
    assert_eq!(status, BicStatus::InvalidArgument);

    let text = CString::new("bic-scheme 1\nfield-degree 8\nchannel n=1 k=1 M=2 L=1\nslots x\n").unwrap();
    let status = unsafe { bic_scheme_parse(text.as_ptr(), &mut scheme) };
    assert_eq!(status, BicStatus::ParseError);
    assert!(last_error().contains("line 4"), "{}", last_error());
}

#[test]
fn corner_family_count() {
    // Toy instance: every family applicable at alpha = 1.
    assert_eq!(bic_corner_family_count(BicSetup::R0RL, 2, 1, 1, 1), 7);
    assert_eq!(bic_corner_family_count(BicSetup::R0RL, 2, 1, 0, 1), 0);
}

#[test]
fn window_check() {
    // Three copies of one uniform bit.
    let alphabets = [2usize, 2, 2];
    let mut probs = [0.0f64; 8];
    probs[0] = 0.5;
    probs[7] = 0.5;
    let mut holds = false;
    let mut chain = [0.0f64; 3];
    let status = unsafe {
        bic_sliding_window_check(alphabets.as_ptr(), 3, probs.as_ptr(), 8, &mut holds, chain.as_mut_ptr())
    };
    assert_eq!(status, BicStatus::Ok);
    assert!(holds);
    assert!((chain[0] - 3.0).abs() < 1e-12 && (chain[1] - 1.5).abs() < 1e-12 && (chain[2] - 1.0).abs() < 1e-12);

    let status = unsafe {
        bic_sliding_window_check(alphabets.as_ptr(), 3, probs.as_ptr(), 7, &mut holds, ptr::null_mut())
    };
    assert_eq!(status, BicStatus::InvalidArgument);
}

#[test]
fn header_is_valid_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/bic.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in [
        "bic_region_compute",
        "bic_region_to_json",
        "bic_scheme_build",
        "bic_scheme_verify",
        "bic_sliding_window_check",
        "bic_last_error",
        "typedef struct BicRegion BicRegion",
    ] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let out = Command::new("cc")
        .args(["-fsyntax-only", "-std=c99", "-Wall", "-Werror", "-x", "c"])
        .arg(&header)
        .output();
    match out {
        Ok(o) => assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr)),
        Err(e) => panic!("a C compiler is needed to check the header: {e}"),
    }
}
