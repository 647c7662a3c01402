//! C interface to `monothetic`.
//!
//! Every call returns a [`MonoStatus`]. On failure the message is kept per
//! thread and can be read with [`mono_last_error`]. Handles are opaque and
//! must be released with the matching `*_free` function. Strings handed out
//! by the library are released with [`mono_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use monothetic::derivations::DerivationSpec;
use monothetic::group::GroupSpec;
use monothetic::lifting::{build_lift, default_characters, hs_condition, verify_lift, LiftPlan};
use monothetic::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MonoStatus {
    Ok = 0,
    /// Null pointer or malformed UTF-8.
    InvalidArgument = 1,
    /// Rejected group, derivation or parameter.
    InputError = 2,
    /// The derivation has an invariant part and cannot be lifted.
    Obstructed = 3,
    /// Operation not available for this group.
    Unsupported = 4,
    /// Panic caught at the boundary.
    Internal = 5,
}

pub struct MonoGroup(GroupSpec);

pub struct MonoDerivation(DerivationSpec);

pub struct MonoLift {
    plan: LiftPlan,
    lifted: DerivationSpec,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> MonoStatus {
    match err {
        Error::Obstructed => MonoStatus::Obstructed,
        Error::UnsupportedGroup => MonoStatus::Unsupported,
        _ => MonoStatus::InputError,
    }
}

fn guard<F: FnOnce() -> Result<(), (MonoStatus, String)>>(f: F) -> MonoStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            MonoStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            MonoStatus::Internal
        }
    }
}

fn lib_err(err: Error) -> (MonoStatus, String) {
    (status_of(&err), err.to_string())
}

fn null(what: &str) -> (MonoStatus, String) {
    (MonoStatus::InvalidArgument, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (MonoStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (MonoStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (MonoStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), (MonoStatus, String)> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).expect("json has no interior nul").into_raw()
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn mono_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn mono_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a group description such as
/// `{"kind":"odometer","primes":[[2,"inf"]],"scale":[2,4,8]}`.
///
/// # Safety
/// `json` must be a nul-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mono_group_from_json(json: *const c_char, out: *mut *mut MonoGroup) -> MonoStatus {
    guard(|| {
        let text = read_str(json, "json")?;
        let g = GroupSpec::from_json(text).map_err(lib_err)?;
        write_out(out, Box::into_raw(Box::new(MonoGroup(g))), "out")
    })
}

/// # Safety
/// `g` must be null or a live group handle.
#[no_mangle]
pub unsafe extern "C" fn mono_group_free(g: *mut MonoGroup) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// 1 for an odometer, 0 for a torus, -1 for null.
///
/// # Safety
/// `g` must be null or a live group handle.
#[no_mangle]
pub unsafe extern "C" fn mono_group_is_odometer(g: *const MonoGroup) -> i32 {
    match g.as_ref() {
        Some(g) => g.0.is_odometer() as i32,
        None => -1,
    }
}

/// Canonical JSON of the group; release with [`mono_string_free`].
///
/// # Safety
/// `g` must be a live group handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mono_group_to_json(g: *const MonoGroup, out: *mut *mut c_char) -> MonoStatus {
    guard(|| {
        let g = deref(g, "group")?;
        write_out(out, into_c_string(g.0.to_json()), "out")
    })
}

/// # Safety
/// `json` must be a nul-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mono_derivation_from_json(json: *const c_char, out: *mut *mut MonoDerivation) -> MonoStatus {
    guard(|| {
        let text = read_str(json, "json")?;
        let d = DerivationSpec::from_json(text).map_err(lib_err)?;
        write_out(out, Box::into_raw(Box::new(MonoDerivation(d))), "out")
    })
}

/// # Safety
/// `d` must be null or a live derivation handle.
#[no_mangle]
pub unsafe extern "C" fn mono_derivation_free(d: *mut MonoDerivation) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// HS sum of the boundary values off multiples of `modulus`.
///
/// # Safety
/// Handles must be live, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mono_hs_condition(
    g: *const MonoGroup,
    d: *const MonoDerivation,
    modulus: u64,
    out: *mut f64,
) -> MonoStatus {
    guard(|| {
        let g = deref(g, "group")?;
        let d = deref(d, "derivation")?;
        let c = hs_condition(&d.0, &g.0, modulus).map_err(lib_err)?;
        write_out(out, c.value, "out")
    })
}

/// Builds a lift of `d` whose closed-form defect is at most `target`.
///
/// # Safety
/// Handles must be live, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mono_lift_build(
    g: *const MonoGroup,
    d: *const MonoDerivation,
    target: f64,
    out: *mut *mut MonoLift,
) -> MonoStatus {
    guard(|| {
        let g = deref(g, "group")?;
        let d = deref(d, "derivation")?;
        if !(target > 0.0) {
            return Err((MonoStatus::InputError, format!("target must be positive, got {target}")));
        }
        let (plan, lifted) = build_lift(&d.0, &g.0, target).map_err(lib_err)?;
        write_out(out, Box::into_raw(Box::new(MonoLift { plan, lifted })), "out")
    })
}

/// # Safety
/// `lift` must be null or a live lift handle.
#[no_mangle]
pub unsafe extern "C" fn mono_lift_free(lift: *mut MonoLift) {
    if !lift.is_null() {
        drop(Box::from_raw(lift));
    }
}

/// Closed-form HS² defect of the lift on the shift generators.
///
/// # Safety
/// `lift` must be a live lift handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mono_lift_defect(lift: *const MonoLift, out: *mut f64) -> MonoStatus {
    guard(|| {
        let lift = deref(lift, "lift")?;
        write_out(out, monothetic::lifting::defect_II(&lift.plan), "out")
    })
}

/// Largest cutoff used by the lift. A verification truncation should be at
/// least four times this.
///
/// # Safety
/// `lift` must be a live lift handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mono_lift_max_cutoff(lift: *const MonoLift, out: *mut u64) -> MonoStatus {
    guard(|| {
        let lift = deref(lift, "lift")?;
        write_out(out, lift.plan.max_cutoff(), "out")
    })
}

/// JSON of the lifted derivation.
///
/// # Safety
/// `lift` must be a live lift handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mono_lift_to_json(lift: *const MonoLift, out: *mut *mut c_char) -> MonoStatus {
    guard(|| {
        let lift = deref(lift, "lift")?;
        write_out(out, into_c_string(lift.lifted.to_json()), "out")
    })
}

/// Checks the closed forms against matrices truncated at `l` and writes the
/// JSON report. `agreement` receives 1 when all of them match.
///
/// # Safety
/// Handles must be live, `report` and `agreement` writable.
#[no_mangle]
pub unsafe extern "C" fn mono_lift_verify(
    lift: *const MonoLift,
    g: *const MonoGroup,
    l: usize,
    report: *mut *mut c_char,
    agreement: *mut i32,
) -> MonoStatus {
    guard(|| {
        let lift = deref(lift, "lift")?;
        let g = deref(g, "group")?;
        if report.is_null() {
            return Err(null("report"));
        }
        let r = verify_lift(&lift.plan, &g.0, l, &default_characters()).map_err(lib_err)?;
        let json = serde_json_text(&r)?;
        write_out(agreement, r.agreement as i32, "agreement")?;
        write_out(report, into_c_string(json), "report")
    })
}

fn serde_json_text(r: &monothetic::lifting::DefectReport) -> Result<String, (MonoStatus, String)> {
    monothetic::report::to_json(r).map_err(lib_err)
}
