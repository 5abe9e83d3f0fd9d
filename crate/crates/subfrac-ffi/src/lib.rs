//! C ABI for the solver: Mittag-Leffler evaluation, configuration-file
//! solves behind an opaque handle, pointwise evaluation, and the
//! verification verdict.
//!
//! Every function returns an integer code (`SUBFRAC_OK` on success);
//! the message for the most recent failure on the calling thread is
//! available through [`subfrac_last_error`], valid until the next call
//! from that thread. Handles from [`subfrac_solve_config`] must be
//! released with [`subfrac_free`]. The C header is generated into
//! `include/subfrac.h` by the build script.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::Path;

use subfrac::config;
use subfrac::solve::{solve_with, ProblemSpec, SolutionField, VerifySettings};
use subfrac::special::{ml, ml_kernel, MlParams};
use subfrac::Error;

pub const SUBFRAC_OK: i32 = 0;
/// Argument outside the mathematical domain (includes null pointers).
pub const SUBFRAC_ERR_DOMAIN: i32 = 1;
/// No evaluation strategy certified the accuracy target.
pub const SUBFRAC_ERR_ACCURACY: i32 = 2;
/// Sampling grid too coarse for the requested cutoff.
pub const SUBFRAC_ERR_GRID: i32 = 3;
/// Malformed configuration file or i/o failure.
pub const SUBFRAC_ERR_CONFIG: i32 = 4;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let clean: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(clean).expect("interior NUL removed");
    });
}

fn fail(e: &Error) -> i32 {
    set_error(&e.to_string());
    match e {
        Error::Domain(_) => SUBFRAC_ERR_DOMAIN,
        Error::AccuracyNotMet(_) => SUBFRAC_ERR_ACCURACY,
        Error::GridTooCoarse(_) => SUBFRAC_ERR_GRID,
        Error::Config(_) | Error::Io(_) => SUBFRAC_ERR_CONFIG,
    }
}

fn fail_null(what: &str) -> i32 {
    set_error(&format!("{what} must not be null"));
    SUBFRAC_ERR_DOMAIN
}

/// Solved field with the problem it came from, so verification can be
/// rerun against the original data.
pub struct SubfracField {
    field: SolutionField,
    spec: ProblemSpec,
    verify: VerifySettings,
}

/// Message for the most recent failure on this thread; empty string if
/// none. The pointer stays valid until the next library call from the
/// same thread.
#[no_mangle]
pub extern "C" fn subfrac_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// E_{rho,mu}(z) with a certified absolute error bound.
///
/// `est_abs_error` may be null if the bound is not wanted.
#[no_mangle]
pub unsafe extern "C" fn subfrac_ml(
    rho: f64,
    mu: f64,
    z: f64,
    value: *mut f64,
    est_abs_error: *mut f64,
) -> i32 {
    if value.is_null() {
        return fail_null("value");
    }
    match ml(MlParams { rho, mu }, z) {
        Ok(e) => {
            *value = e.value;
            if !est_abs_error.is_null() {
                *est_abs_error = e.est_abs_error;
            }
            SUBFRAC_OK
        }
        Err(e) => fail(&e),
    }
}

/// Relaxation kernel t^{rho-1} E_{rho,rho}(-lambda t^rho).
#[no_mangle]
pub unsafe extern "C" fn subfrac_ml_kernel(
    rho: f64,
    lambda: f64,
    t: f64,
    value: *mut f64,
) -> i32 {
    if value.is_null() {
        return fail_null("value");
    }
    match ml_kernel(rho, lambda, t) {
        Ok(v) => {
            *value = v;
            SUBFRAC_OK
        }
        Err(e) => fail(&e),
    }
}

/// Solve the problem described by a TOML configuration file and hand
/// back an owned field handle through `out`.
#[no_mangle]
pub unsafe extern "C" fn subfrac_solve_config(
    path: *const c_char,
    out: *mut *mut SubfracField,
) -> i32 {
    if path.is_null() {
        return fail_null("path");
    }
    if out.is_null() {
        return fail_null("out");
    }
    *out = std::ptr::null_mut();
    let path = match CStr::from_ptr(path).to_str() {
        Ok(s) => Path::new(s),
        Err(_) => {
            set_error("path is not valid UTF-8");
            return SUBFRAC_ERR_CONFIG;
        }
    };
    let built = match config::load_config(path).and_then(|cfg| {
        let base = path.parent().unwrap_or(Path::new("."));
        config::build(&cfg, base)
    }) {
        Ok(b) => b,
        Err(e) => return fail(&e),
    };
    let field = match solve_with(&built.spec, &built.solver).and_then(|f| match built.inject {
        Some((mode, delta)) => f.perturb_mode(mode, delta),
        None => Ok(f),
    }) {
        Ok(f) => f,
        Err(e) => return fail(&e),
    };
    let handle = Box::new(SubfracField { field, spec: built.spec, verify: built.verify });
    *out = Box::into_raw(handle);
    SUBFRAC_OK
}

/// Spatial dimension of the field's basis.
#[no_mangle]
pub unsafe extern "C" fn subfrac_dimension(field: *const SubfracField) -> i32 {
    if field.is_null() {
        fail_null("field");
        return -1;
    }
    (*field).field.basis().dimension() as i32
}

/// Number of enumerated modes.
#[no_mangle]
pub unsafe extern "C" fn subfrac_mode_count(field: *const SubfracField) -> i32 {
    if field.is_null() {
        fail_null("field");
        return -1;
    }
    (*field).field.basis().modes().len() as i32
}

/// Time horizon the field is valid on.
#[no_mangle]
pub unsafe extern "C" fn subfrac_horizon(field: *const SubfracField) -> f64 {
    if field.is_null() {
        fail_null("field");
        return f64::NAN;
    }
    (*field).field.horizon()
}

/// u(x, t) for t in (0, horizon]; `x` points at `dim` coordinates.
#[no_mangle]
pub unsafe extern "C" fn subfrac_evaluate(
    field: *const SubfracField,
    x: *const f64,
    dim: usize,
    t: f64,
    out: *mut f64,
) -> i32 {
    eval_impl(field, x, dim, t, out, false)
}

/// t^{1-rho} u(x, t); t = 0 returns the weighted limit phi(x)/Gamma(rho).
#[no_mangle]
pub unsafe extern "C" fn subfrac_weighted_evaluate(
    field: *const SubfracField,
    x: *const f64,
    dim: usize,
    t: f64,
    out: *mut f64,
) -> i32 {
    eval_impl(field, x, dim, t, out, true)
}

unsafe fn eval_impl(
    field: *const SubfracField,
    x: *const f64,
    dim: usize,
    t: f64,
    out: *mut f64,
    weighted: bool,
) -> i32 {
    if field.is_null() {
        return fail_null("field");
    }
    if x.is_null() {
        return fail_null("x");
    }
    if out.is_null() {
        return fail_null("out");
    }
    let coords = std::slice::from_raw_parts(x, dim);
    let r = if weighted {
        (*field).field.weighted_evaluate(coords, t)
    } else {
        (*field).field.evaluate(coords, t)
    };
    match r {
        Ok(v) => {
            *out = v;
            SUBFRAC_OK
        }
        Err(e) => fail(&e),
    }
}

/// Run the verification suite against the field's own problem
/// description; writes 1 into `pass` when every gated check holds.
#[no_mangle]
pub unsafe extern "C" fn subfrac_verify(field: *const SubfracField, pass: *mut i32) -> i32 {
    if field.is_null() {
        return fail_null("field");
    }
    if pass.is_null() {
        return fail_null("pass");
    }
    let h = &*field;
    match subfrac::solve::verify(&h.field, &h.spec, &h.verify) {
        Ok(report) => {
            *pass = report.pass as i32;
            SUBFRAC_OK
        }
        Err(e) => fail(&e),
    }
}

/// Release a field handle; null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn subfrac_free(field: *mut SubfracField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}
