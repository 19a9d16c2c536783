use std::ffi::{c_char, CStr, CString};
use std::process::Command;
use std::ptr;

use sigma_sheaf_ffi::*;

const CONFIG: &str = "protocol = \"schnorr\"\np = \"23\"\nq = \"11\"\ng = \"2\"\nx = \"3\"\nchecks = [\"group\", \"completeness\", \"hvzk\"]\n";

fn last_error() -> String {
    unsafe { CStr::from_ptr(ss_last_error()) }.to_str().unwrap().to_string()
}

fn new_suite(text: &str) -> (SsStatus, *mut SsSuite) {
    let text = CString::new(text).unwrap();
    let mut suite = ptr::null_mut();
    let status = unsafe { ss_suite_new(text.as_ptr(), &mut suite) };
    (status, suite)
}

fn take_string(p: *mut c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string();
    unsafe { ss_string_free(p) };
    s
}

#[test]
fn suite_round_trip() {
    let (status, suite) = new_suite(CONFIG);
    assert_eq!(status, SsStatus::Ok);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { ss_suite_report(suite, SsEmit::Machine, &mut out) }, SsStatus::NotRun);
    assert!(out.is_null());
    let mut passed = false;
    assert_eq!(unsafe { ss_suite_run(suite, &mut passed) }, SsStatus::Ok);
    assert!(passed);
    assert_eq!(unsafe { ss_suite_report(suite, SsEmit::Machine, &mut out) }, SsStatus::Ok);
    let report: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
    assert_eq!(report["overall"], "pass");
    assert_eq!(report["checks"].as_array().unwrap().len(), 3);
    assert_eq!(unsafe { ss_suite_report(suite, SsEmit::Human, &mut out) }, SsStatus::Ok);
    assert!(take_string(out).contains("overall: pass"));
    unsafe { ss_suite_free(suite) };
}

#[test]
fn bad_config_reports_location() {
    let (status, suite) = new_suite("protocol = \"schnorr\"\np = 22\nq = 11\ng = 2\nx = 3\n");
    assert_eq!(status, SsStatus::Config);
    assert!(suite.is_null());
    assert!(last_error().contains("not prime"), "{}", last_error());
}

#[test]
fn null_and_invalid_inputs() {
    let mut suite = ptr::null_mut();
    assert_eq!(unsafe { ss_suite_new(ptr::null(), &mut suite) }, SsStatus::NullPointer);
    let bytes = [0xffu8, 0];
    assert_eq!(unsafe { ss_suite_new(bytes.as_ptr().cast(), &mut suite) }, SsStatus::InvalidUtf8);
    assert_eq!(unsafe { ss_suite_run(ptr::null_mut(), ptr::null_mut()) }, SsStatus::NullPointer);
    unsafe {
        ss_suite_free(ptr::null_mut());
        ss_string_free(ptr::null_mut());
    }
}

#[test]
fn verifies_records() {
    let verify = |text: &str| {
        let text = CString::new(text).unwrap();
        let mut accepted = false;
        let status = unsafe { ss_verify_record(text.as_ptr(), &mut accepted) };
        (status, accepted)
    };
    assert_eq!(verify("protocol=schnorr p=23 q=11 g=2 y=8 a=9 e=4 z=6"), (SsStatus::Ok, true));
    assert_eq!(verify("protocol=schnorr p=23 q=11 g=2 y=8 a=9 e=4 z=7"), (SsStatus::Ok, false));
    assert_eq!(verify("protocol=chaum_pedersen p=23 q=11 g=2 h=4 y=8:18 a=9:12 e=4 z=6"), (SsStatus::Ok, true));
    assert_eq!(verify("protocol=schnorr p=23 q=11 g=2 y=8 a=9 e=4").0, SsStatus::Record);
    assert!(last_error().contains("\"z\""), "{}", last_error());
}

#[test]
fn header_compiles_and_links_from_c() {
    let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = root.join("include/sigma_sheaf.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["ss_suite_new", "ss_suite_run", "ss_suite_report", "ss_suite_free", "ss_verify_record", "ss_string_free", "ss_last_error", "SS_STATUS_CONFIG"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    // cargo only builds the rlib for tests, so build the static library separately
    let target = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("staticlib");
    let built = Command::new(env!("CARGO"))
        .args(["build", "--quiet", "--lib", "--manifest-path"])
        .arg(root.join("Cargo.toml"))
        .arg("--target-dir")
        .arg(&target)
        .status()
        .unwrap();
    assert!(built.success());
    let staticlib = target.join("debug/libsigma_sheaf_ffi.a");
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let status = Command::new("cc")
        .arg(root.join("tests/smoke.c"))
        .arg("-I")
        .arg(root.join("include"))
        .arg(&staticlib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "accepted=1 config=3 overall=pass\n");
}
