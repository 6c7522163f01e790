//! C interface to `cyclic-ef`.
//!
//! Every function returns a [`CefStatus`]; on anything but `CEF_STATUS_OK` the
//! message is available from [`cef_last_error`] on the same thread.
//! Handles are opaque and owned by the caller, who releases them with the
//! matching `*_free`. Strings handed out must go back through
//! [`cef_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cyclic_ef::geometry::{self, CyclicPolytope, Interval};
use cyclic_ef::{cli, factorization, io, Error, ExtendedFormulation, NonnegFactorization};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CefStatus {
    Ok = 0,
    /// A factorization failed verification or a cross-check disagreed.
    VerifyFailed = 1,
    /// Arguments out of range.
    Domain = 2,
    /// Input text could not be parsed.
    Parse = 3,
    /// A construction broke one of its own invariants.
    Internal = 4,
    NullPointer = 5,
    Panic = 6,
}

/// A nonnegative factorization of a cyclic-polytope slack matrix.
pub struct CefFactorization(NonnegFactorization);

/// An extended formulation of a cyclic polytope.
pub struct CefFormulation(ExtendedFormulation);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> CefStatus {
    match e {
        Error::Domain(_) => CefStatus::Domain,
        Error::Parse(_) | Error::Json(_) | Error::Io(_) => CefStatus::Parse,
        Error::Internal(_) | Error::Projection(_) | Error::Malformed(_) => CefStatus::Internal,
    }
}

/// Runs `f`, turning errors and panics into a status and a stored message.
fn guard(f: impl FnOnce() -> Result<(), (CefStatus, String)>) -> CefStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CefStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside cyclic-ef");
            CefStatus::Panic
        }
    }
}

fn lib(e: Error) -> (CefStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (CefStatus, String) {
    (CefStatus::NullPointer, format!("{what} is null"))
}

fn out_string(text: String, out: *mut *mut c_char) -> Result<(), (CefStatus, String)> {
    let c = CString::new(text).map_err(|_| {
        (
            CefStatus::Internal,
            "output contains a NUL byte".to_string(),
        )
    })?;
    unsafe { *out = c.into_raw() };
    Ok(())
}

fn in_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, (CefStatus, String)> {
    if s.is_null() {
        return Err(null(what));
    }
    unsafe { CStr::from_ptr(s) }
        .to_str()
        .map_err(|_| (CefStatus::Parse, format!("{what} is not UTF-8")))
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cef_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn cef_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Factorization of the slack matrix of `P^d_n` on `[1, n]`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cef_factorize(
    n: usize,
    d: usize,
    out: *mut *mut CefFactorization,
) -> CefStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let f = factorization::factorize(n, d).map_err(lib)?.factorization;
        *out = Box::into_raw(Box::new(CefFactorization(f)));
        Ok(())
    })
}

/// # Safety
/// `f` must be null or a handle from this library.
#[no_mangle]
pub unsafe extern "C" fn cef_factorization_free(f: *mut CefFactorization) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Rank, or 0 for a null handle.
///
/// # Safety
/// `f` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cef_factorization_rank(f: *const CefFactorization) -> usize {
    f.as_ref().map_or(0, |f| f.0.rank())
}

/// Number of rows (vertices).
///
/// # Safety
/// `f` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cef_factorization_rows(f: *const CefFactorization) -> usize {
    f.as_ref().map_or(0, |f| f.0.factors.rows())
}

/// Number of columns (facets).
///
/// # Safety
/// `f` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cef_factorization_cols(f: *const CefFactorization) -> usize {
    f.as_ref().map_or(0, |f| f.0.factors.cols())
}

/// Checks every entry against the slack matrix. Returns `CEF_STATUS_OK` when it
/// reconstructs exactly and `CEF_STATUS_VERIFY_FAILED` with the first offending
/// entry in the error message otherwise.
///
/// # Safety
/// `f` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cef_factorization_verify(f: *const CefFactorization) -> CefStatus {
    guard(|| {
        let f = &f.as_ref().ok_or_else(|| null("factorization"))?.0;
        let m = geometry::slack_matrix(&f.target);
        let report = factorization::verify(&m, f).map_err(lib)?;
        if report.ok {
            return Ok(());
        }
        let msg = match (report.first_mismatch, report.first_negative) {
            (Some(mm), _) => format!(
                "entry ({}, {}) is {}, expected {}",
                f.target.interval.t1 + mm.row as i64,
                m.columns[mm.col],
                mm.got,
                mm.expected
            ),
            (None, Some((is_beta, k, c))) => {
                format!(
                    "negative entry {c} in {} vector {k}",
                    if is_beta { "beta" } else { "alpha" }
                )
            }
            (None, None) => "verification failed".to_string(),
        };
        Err((CefStatus::VerifyFailed, msg))
    })
}

/// # Safety
/// `f` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cef_factorization_to_json(
    f: *const CefFactorization,
    out: *mut *mut c_char,
) -> CefStatus {
    guard(|| {
        let f = &f.as_ref().ok_or_else(|| null("factorization"))?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        out_string(io::factorization_to_json(f).map_err(lib)?, out)
    })
}

/// Parses a factorization. Shapes are checked; entries are not, so call
/// [`cef_factorization_verify`] before trusting it.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cef_factorization_from_json(
    json: *const c_char,
    out: *mut *mut CefFactorization,
) -> CefStatus {
    guard(|| {
        let text = in_str(json, "json")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let f = io::factorization_from_json(text).map_err(lib)?;
        *out = Box::into_raw(Box::new(CefFactorization(f)));
        Ok(())
    })
}

/// Facets of `P^d_n` as JSON.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cef_facets_json(n: usize, d: usize, out: *mut *mut c_char) -> CefStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let p = CyclicPolytope::standard(n, d).map_err(lib)?;
        out_string(
            io::facets_to_json(&p, &geometry::enumerate_facets(&p)).map_err(lib)?,
            out,
        )
    })
}

/// Extended formulation of `P^d_n`: the reflection construction for
/// `d = 2`, the factorization formulation otherwise.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cef_ef_build(
    n: usize,
    d: usize,
    out: *mut *mut CefFormulation,
) -> CefStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let p = CyclicPolytope::standard(n, d).map_err(lib)?;
        let ef = cli::build_ef(&p).map_err(lib)?;
        *out = Box::into_raw(Box::new(CefFormulation(ef)));
        Ok(())
    })
}

/// Number of inequalities, or 0 for a null handle.
///
/// # Safety
/// `ef` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cef_ef_size(ef: *const CefFormulation) -> usize {
    ef.as_ref().map_or(0, |ef| ef.0.size())
}

/// LP-style listing of the formulation.
///
/// # Safety
/// `ef` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cef_ef_text(
    ef: *const CefFormulation,
    out: *mut *mut c_char,
) -> CefStatus {
    guard(|| {
        let ef = &ef.as_ref().ok_or_else(|| null("formulation"))?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        out_string(io::ef_to_text(ef), out)
    })
}

/// # Safety
/// `ef` must be null or a handle from this library.
#[no_mangle]
pub unsafe extern "C" fn cef_ef_free(ef: *mut CefFormulation) {
    if !ef.is_null() {
        drop(Box::from_raw(ef));
    }
}

/// Minimizes `c[0] + c[1] t + ... + c[len-1] t^(len-1)` over the integers
/// `1..=n` with one exact LP and checks it against direct evaluation.
/// `report` receives the JSON report; `t_star` the smallest minimizer.
///
/// # Safety
/// `coeffs` must point to `len` integers; `t_star` and `report` must be
/// valid pointers (`report` may be null to skip the report).
#[no_mangle]
pub unsafe extern "C" fn cef_minimize_poly(
    coeffs: *const i64,
    len: usize,
    n: usize,
    t_star: *mut i64,
    report: *mut *mut c_char,
) -> CefStatus {
    guard(|| {
        if coeffs.is_null() {
            return Err(null("coeffs"));
        }
        if t_star.is_null() {
            return Err(null("t_star"));
        }
        if n == 0 {
            return Err((CefStatus::Domain, "n must be positive".to_string()));
        }
        let c: Vec<_> = std::slice::from_raw_parts(coeffs, len)
            .iter()
            .map(|&v| cyclic_ef::rational::int(v))
            .collect();
        let interval = Interval::new(1, n as i64).map_err(lib)?;
        let r = cli::minimize_poly(&c, interval).map_err(lib)?;
        *t_star = r.t_star;
        if !report.is_null() {
            out_string(
                serde_json::to_string(&r).map_err(|e| lib(e.into()))?,
                report,
            )?;
        }
        if !r.agree {
            return Err((
                CefStatus::VerifyFailed,
                format!(
                    "LP value {} differs from direct minimum {}",
                    r.lp_value, r.brute_value
                ),
            ));
        }
        Ok(())
    })
}
