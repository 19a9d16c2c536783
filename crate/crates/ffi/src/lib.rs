//! C ABI over the sigma-sheaf laboratory.
//!
//! Every entry point returns an [`SsStatus`]. On failure a message is kept per
//! thread and can be read with [`ss_last_error`]. Strings handed out by this
//! library must be released with [`ss_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use sigma_sheaf::config::{parse_config, EmitFormat, SuiteConfig};
use sigma_sheaf::record::{verify_record, TranscriptRecord};
use sigma_sheaf::suite::{emit_report, run_suite, SuiteReport};

/// Result codes shared by every function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Config = 3,
    Suite = 4,
    Record = 5,
    /// The suite has not been run on this handle.
    NotRun = 6,
    Panic = 7,
}

/// Report layouts accepted by [`ss_suite_report`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SsEmit {
    Machine = 0,
    Human = 1,
}

/// A parsed configuration and, once run, its report.
pub struct SsSuite {
    config: SuiteConfig,
    report: Option<SuiteReport>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn guard(f: impl FnOnce() -> Result<(), (SsStatus, String)>) -> SsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            SsStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            SsStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(text: *const c_char) -> Result<&'a str, (SsStatus, String)> {
    if text.is_null() {
        return Err((SsStatus::NullPointer, "null string".into()));
    }
    CStr::from_ptr(text).to_str().map_err(|e| (SsStatus::InvalidUtf8, e.to_string()))
}

fn null(what: &str) -> (SsStatus, String) {
    (SsStatus::NullPointer, format!("null {what}"))
}

/// Message for the last failed call on this thread, or an empty string.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn ss_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses TOML configuration text into a new handle.
///
/// # Safety
/// `config` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn ss_suite_new(config: *const c_char, out: *mut *mut SsSuite) -> SsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        *out = ptr::null_mut();
        let text = read_str(config)?;
        let config = parse_config(text).map_err(|e| (SsStatus::Config, e.to_string()))?;
        *out = Box::into_raw(Box::new(SsSuite { config, report: None }));
        Ok(())
    })
}

/// Runs the configured checks and stores the report on the handle.
///
/// # Safety
/// `suite` must come from [`ss_suite_new`]; `passed` may be null.
#[no_mangle]
pub unsafe extern "C" fn ss_suite_run(suite: *mut SsSuite, passed: *mut bool) -> SsStatus {
    guard(|| {
        let suite = suite.as_mut().ok_or_else(|| null("suite"))?;
        let report = run_suite(&suite.config).map_err(|e| (SsStatus::Suite, e.to_string()))?;
        if !passed.is_null() {
            *passed = report.passed();
        }
        suite.report = Some(report);
        Ok(())
    })
}

/// Renders the stored report. Release the string with [`ss_string_free`].
///
/// # Safety
/// `suite` must come from [`ss_suite_new`] and `out` be a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn ss_suite_report(suite: *const SsSuite, emit: SsEmit, out: *mut *mut c_char) -> SsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        *out = ptr::null_mut();
        let suite = suite.as_ref().ok_or_else(|| null("suite"))?;
        let report = suite.report.as_ref().ok_or((SsStatus::NotRun, "suite has not been run".to_string()))?;
        let format = match emit {
            SsEmit::Machine => EmitFormat::Machine,
            SsEmit::Human => EmitFormat::Human,
        };
        let text = CString::new(emit_report(report, format)).map_err(|e| (SsStatus::Suite, e.to_string()))?;
        *out = text.into_raw();
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `suite` must come from [`ss_suite_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ss_suite_free(suite: *mut SsSuite) {
    if !suite.is_null() {
        drop(Box::from_raw(suite));
    }
}

/// Parses a one-line transcript record and runs the verifier it names.
///
/// # Safety
/// `record` must be a NUL-terminated string and `accepted` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn ss_verify_record(record: *const c_char, accepted: *mut bool) -> SsStatus {
    guard(|| {
        if accepted.is_null() {
            return Err(null("output pointer"));
        }
        let record: TranscriptRecord = read_str(record)?.parse().map_err(|e: sigma_sheaf::record::RecordError| (SsStatus::Record, e.to_string()))?;
        *accepted = verify_record(&record).map_err(|e| (SsStatus::Record, e.to_string()))?;
        Ok(())
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `text` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ss_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(CString::from_raw(text));
    }
}
