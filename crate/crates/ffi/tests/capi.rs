use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::ptr;

use netsup_ffi::*;
use serde_json::Value;

fn fixture(name: &str) -> CString {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name);
    CString::new(p.to_str().unwrap()).unwrap()
}

fn load(name: &str) -> *mut NetsupModel {
    let mut m = ptr::null_mut();
    let status = unsafe { netsup_model_from_file(fixture(name).as_ptr(), &mut m) };
    assert_eq!(status, NetsupStatus::Ok);
    assert!(!m.is_null());
    m
}

/// Takes ownership of a returned string.
fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { netsup_string_free(s) };
    out
}

fn last_error() -> String {
    let p = netsup_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn solve_fixture_through_the_c_interface() {
    let m = load("production_line.json");
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { netsup_solve(m, false, &mut out) }, NetsupStatus::Ok);
    let j: Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(j["solvable"], true);
    assert_eq!(j["spec_version"], 1);

    let mut out = ptr::null_mut();
    assert_eq!(unsafe { netsup_synthesize(m, false, &mut out) }, NetsupStatus::Ok);
    let j: Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(j["supervisors"].as_array().unwrap().len(), 2);

    let mut out = ptr::null_mut();
    assert_eq!(unsafe { netsup_simulate(m, 4, 30, &mut out) }, NetsupStatus::Ok);
    assert_eq!(take(out).lines().count(), 31);

    for target in [
        NetsupDotTarget::Plant,
        NetsupDotTarget::Spec,
        NetsupDotTarget::Comm,
        NetsupDotTarget::Observer,
        NetsupDotTarget::ClosedLoop,
    ] {
        let mut out = ptr::null_mut();
        assert_eq!(unsafe { netsup_export_dot(m, target, 2, &mut out) }, NetsupStatus::Ok);
        assert!(take(out).starts_with("digraph"));
    }
    unsafe { netsup_model_free(m) };
}

#[test]
fn negative_verdicts_are_not_errors() {
    let m = load("production_line_no_ch21.json");
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { netsup_check(m, &mut out) }, NetsupStatus::Negative);
    let j: Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(j["holds"], false);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { netsup_synthesize(m, false, &mut out) }, NetsupStatus::Negative);
    assert!(out.is_null());
    unsafe { netsup_model_free(m) };
}

#[test]
fn errors_carry_codes_and_messages() {
    let mut m = ptr::null_mut();
    let missing = CString::new("/nonexistent/model.json").unwrap();
    assert_eq!(unsafe { netsup_model_from_file(missing.as_ptr(), &mut m) }, NetsupStatus::Io);
    assert!(last_error().contains("/nonexistent/model.json"));
    assert!(m.is_null());

    let bad = CString::new("{ not json").unwrap();
    assert_eq!(unsafe { netsup_model_from_json(bad.as_ptr(), &mut m) }, NetsupStatus::Json);

    assert_eq!(unsafe { netsup_model_from_json(ptr::null(), &mut m) }, NetsupStatus::NullArgument);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { netsup_check(ptr::null(), &mut out) }, NetsupStatus::NullArgument);
    assert!(last_error().contains("model is null"));

    let m = load("production_line.json");
    assert_eq!(
        unsafe { netsup_export_dot(m, NetsupDotTarget::Observer, 0, &mut out) },
        NetsupStatus::Schema
    );
    unsafe { netsup_model_free(m) };
    unsafe { netsup_model_free(ptr::null_mut()) };
    unsafe { netsup_string_free(ptr::null_mut()) };
}

#[test]
fn model_from_json_round_trip() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures/minimal.json");
    let text = CString::new(std::fs::read_to_string(path).unwrap()).unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { netsup_model_from_json(text.as_ptr(), &mut m) }, NetsupStatus::Ok);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { netsup_solve(m, false, &mut out) }, NetsupStatus::Ok);
    take(out);
    unsafe { netsup_model_free(m) };
}

#[test]
fn version_and_header() {
    let v = unsafe { CStr::from_ptr(netsup_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
    let header = std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/netsup.h")).unwrap();
    for name in [
        "typedef struct NetsupModel NetsupModel;",
        "NETSUP_STATUS_NEGATIVE = 1",
        "netsup_model_from_json(",
        "netsup_model_free(",
        "netsup_solve(",
        "netsup_check(",
        "netsup_synthesize(",
        "netsup_simulate(",
        "netsup_export_dot(",
        "netsup_string_free(",
        "netsup_last_error_message(",
    ] {
        assert!(header.contains(name), "{name}");
    }
}
