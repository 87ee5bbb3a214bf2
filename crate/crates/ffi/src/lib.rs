//! C ABI over the `ellunit` report pipeline.
//!
//! An instance is loaded once from JSON text into an opaque handle. Commands
//! run against the handle and return the same JSON documents the command-line
//! tool prints. Every call returns an [`EllunitStatus`]; the message of the
//! most recent failure on the calling thread is available from
//! [`ellunit_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ellunit::cli::{run_request, Request};
use ellunit::frame::{validate, Frame, RamificationInstance};
use ellunit::report;
use ellunit::Error;
use serde_json::Value;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EllunitStatus {
    Ok = 0,
    InvalidInput = 1,
    Validation = 2,
    ModelDiscrepancy = 3,
    NotSublattice = 4,
    Internal = 5,
    Io = 6,
    NullPointer = 7,
    Panic = 8,
}

impl From<&Error> for EllunitStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidInput(_) => EllunitStatus::InvalidInput,
            Error::Validation(_) => EllunitStatus::Validation,
            Error::ModelDiscrepancy(_) => EllunitStatus::ModelDiscrepancy,
            Error::NotSublattice(_) => EllunitStatus::NotSublattice,
            Error::Internal(_) => EllunitStatus::Internal,
            Error::Io(_) => EllunitStatus::Io,
        }
    }
}

/// Opaque handle to a validated instance.
pub struct EllunitInstance {
    frame: Frame,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    let c = CString::new(msg).expect("interior NULs removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

fn fail(status: EllunitStatus, msg: impl Into<String>) -> EllunitStatus {
    set_last_error(msg);
    status
}

fn fail_with(e: &Error) -> EllunitStatus {
    fail(e.into(), e.to_string())
}

/// Runs `f`, converting a panic into [`EllunitStatus::Panic`].
fn guarded(f: impl FnOnce() -> EllunitStatus) -> EllunitStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(EllunitStatus::Panic, format!("panic: {msg}"))
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, EllunitStatus> {
    if p.is_null() {
        return Err(fail(EllunitStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(EllunitStatus::InvalidInput, format!("{what} is not valid UTF-8")))
}

fn into_c_string(text: String) -> *mut c_char {
    CString::new(text).map_or(ptr::null_mut(), CString::into_raw)
}

fn parse_request(command: &str, options: &Value) -> Result<(Request, u64, bool), String> {
    let opt_str = |key: &str, default: &str| -> Result<String, String> {
        match options.get(key) {
            None | Some(Value::Null) => Ok(default.to_string()),
            Some(Value::String(s)) => Ok(s.clone()),
            Some(Value::Number(n)) => Ok(n.to_string()),
            Some(other) => Err(format!("option {key:?} must be a string, got {other}")),
        }
    };
    let opt_u64 = |key: &str| -> Result<Option<u64>, String> {
        match options.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => v.as_u64().map(Some).ok_or_else(|| format!("option {key:?} must be a non-negative integer")),
        }
    };
    let seed = opt_u64("seed")?.unwrap_or(0);
    let all_j = match options.get("all_j") {
        None | Some(Value::Null) => false,
        Some(v) => v.as_bool().ok_or("option \"all_j\" must be a boolean")?,
    };
    let req = match command {
        "validate" => Request::Validate,
        "derive" => Request::Derive,
        "build" => Request::Build,
        "solve" => Request::Solve {
            level: opt_u64("level")?.map(|l| u32::try_from(l).map_err(|_| "option \"level\" is too large")).transpose()?,
        },
        "extend" => {
            let m = opt_u64("m")?.ok_or("extend needs option \"m\"")?;
            let lambda_extra = match options.get("lambda_extra") {
                Some(Value::Array(a)) => a
                    .iter()
                    .map(|x| x.as_i64().ok_or("option \"lambda_extra\" must hold integers"))
                    .collect::<Result<Vec<_>, _>>()?,
                _ => return Err("extend needs option \"lambda_extra\" as an integer array".into()),
            };
            Request::Extend { m, lambda_extra }
        }
        "annihilate" => Request::Annihilate {
            kappa: options
                .get("kappa")
                .and_then(Value::as_str)
                .ok_or("annihilate needs option \"kappa\" as a string")?
                .to_string(),
            f: opt_str("f", "1")?,
        },
        "selftest" => Request::Selftest,
        "report" => Request::Report { kappa: opt_str("kappa", "1")? },
        other => return Err(format!("unknown command {other:?}")),
    };
    Ok((req, seed, all_j))
}

/// Parse and validate an instance from JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer. On
/// success `*out` owns a handle that must be released with
/// [`ellunit_instance_free`]; on failure `*out` is set to NULL.
#[no_mangle]
pub unsafe extern "C" fn ellunit_instance_from_json(
    json: *const c_char,
    out: *mut *mut EllunitInstance,
) -> EllunitStatus {
    guarded(|| {
        if out.is_null() {
            return fail(EllunitStatus::NullPointer, "out is null");
        }
        *out = ptr::null_mut();
        let text = match read_str(json, "json") {
            Ok(t) => t,
            Err(status) => return status,
        };
        match RamificationInstance::from_json(text).and_then(|inst| validate(&inst)) {
            Ok(frame) => {
                *out = Box::into_raw(Box::new(EllunitInstance { frame }));
                EllunitStatus::Ok
            }
            Err(e) => fail_with(&e),
        }
    })
}

/// Release a handle. NULL is ignored.
///
/// # Safety
/// `instance` must come from [`ellunit_instance_from_json`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ellunit_instance_free(instance: *mut EllunitInstance) {
    if !instance.is_null() {
        drop(Box::from_raw(instance));
    }
}

/// Prime `p` and exponent `k` of the instance.
///
/// # Safety
/// `instance` must be a live handle; `p` and `k` writable pointers.
#[no_mangle]
pub unsafe extern "C" fn ellunit_instance_shape(
    instance: *const EllunitInstance,
    p: *mut u64,
    k: *mut u32,
) -> EllunitStatus {
    if instance.is_null() || p.is_null() || k.is_null() {
        return fail(EllunitStatus::NullPointer, "instance, p and k must be non-null");
    }
    let frame = &(*instance).frame;
    *p = frame.p;
    *k = frame.k;
    EllunitStatus::Ok
}

/// Run `command` and write the report document as pretty JSON to `*out_json`.
///
/// `command` is one of `validate`, `derive`, `build`, `solve`, `extend`,
/// `annihilate`, `selftest` or `report`. `options_json` may be NULL or a JSON
/// object with keys `seed`, `all_j`, `level`, `m`, `lambda_extra`, `kappa`, `f`.
///
/// A document is produced whenever the command ran, including when one of its
/// checks failed; the status then names the failure class. `*out_json` is NULL
/// only if the options or arguments were rejected before running.
///
/// # Safety
/// `instance` must be a live handle, the strings NUL-terminated, and `out_json`
/// writable. A returned string must be released with [`ellunit_string_free`].
#[no_mangle]
pub unsafe extern "C" fn ellunit_run(
    instance: *const EllunitInstance,
    command: *const c_char,
    options_json: *const c_char,
    out_json: *mut *mut c_char,
) -> EllunitStatus {
    guarded(|| {
        if out_json.is_null() {
            return fail(EllunitStatus::NullPointer, "out_json is null");
        }
        *out_json = ptr::null_mut();
        if instance.is_null() {
            return fail(EllunitStatus::NullPointer, "instance is null");
        }
        let command = match read_str(command, "command") {
            Ok(c) => c,
            Err(status) => return status,
        };
        let options = if options_json.is_null() {
            Value::Object(Default::default())
        } else {
            let text = match read_str(options_json, "options_json") {
                Ok(t) => t,
                Err(status) => return status,
            };
            match serde_json::from_str::<Value>(text) {
                Ok(v @ Value::Object(_)) => v,
                Ok(_) => return fail(EllunitStatus::InvalidInput, "options_json must be a JSON object"),
                Err(e) => return fail(EllunitStatus::InvalidInput, format!("options_json: {e}")),
            }
        };
        let (req, seed, all_j) = match parse_request(command, &options) {
            Ok(r) => r,
            Err(msg) => return fail(EllunitStatus::InvalidInput, msg),
        };
        let (doc, failure) = run_request(&(*instance).frame, &req, seed, all_j);
        *out_json = into_c_string(report::to_json(&doc));
        match failure {
            Some(e) => fail_with(&e),
            None => EllunitStatus::Ok,
        }
    })
}

/// Release a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ellunit_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failure on this thread, or NULL.
///
/// The pointer stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn ellunit_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Exit code the command-line tool uses for `status`.
#[no_mangle]
pub extern "C" fn ellunit_status_exit_code(status: EllunitStatus) -> i32 {
    match status {
        EllunitStatus::Ok => 0,
        EllunitStatus::Validation => 2,
        EllunitStatus::ModelDiscrepancy | EllunitStatus::NotSublattice | EllunitStatus::Internal | EllunitStatus::Panic => 3,
        EllunitStatus::InvalidInput | EllunitStatus::Io | EllunitStatus::NullPointer => 4,
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ellunit_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
