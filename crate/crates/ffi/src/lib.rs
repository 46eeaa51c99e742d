//! C ABI over `jacobi_spectra`.
//!
//! Models are opaque `JsModel` handles built from the same JSON model files
//! the CLI reads. Every entry point returns a `JsStatus`; on failure the
//! message is available from `js_last_error` on the calling thread. Reports
//! come back as JSON strings owned by the library and released with
//! `js_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use jacobi_spectra::eigen::{bound_ratio, classify_model};
use jacobi_spectra::sequences::Jacobi;
use jacobi_spectra::spectrum::{finite_section, BoxRegion, SectionOptions};
use jacobi_spectra::transfer::{discriminant, lambda_scan, n_step, LimitFamily, ScanLine, TransferMatrix};
use jacobi_spectra::turan::{estimate_gamma, turan_trace};
use jacobi_spectra::Error;
use num_complex::Complex64;

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Precondition = 4,
    Numerical = 5,
    Io = 6,
    Panic = 7,
}

/// Complex number as `re + i im`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JsComplex {
    pub re: f64,
    pub im: f64,
}

/// Row-major 2×2 complex matrix.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JsMatrix {
    pub m11: JsComplex,
    pub m12: JsComplex,
    pub m21: JsComplex,
    pub m22: JsComplex,
}

/// Opaque coefficient model.
pub struct JsModel {
    inner: Jacobi,
}

impl From<Complex64> for JsComplex {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<JsComplex> for Complex64 {
    fn from(z: JsComplex) -> Self {
        Complex64::new(z.re, z.im)
    }
}

impl From<TransferMatrix> for JsMatrix {
    fn from(t: TransferMatrix) -> Self {
        Self {
            m11: t.m[0][0].into(),
            m12: t.m[0][1].into(),
            m21: t.m[1][0].into(),
            m22: t.m[1][1].into(),
        }
    }
}

impl From<JsMatrix> for TransferMatrix {
    fn from(m: JsMatrix) -> Self {
        TransferMatrix::new(m.m11.into(), m.m12.into(), m.m21.into(), m.m22.into())
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(JsStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Json(_) => JsStatus::Parse,
            Error::Io(_) => JsStatus::Io,
            Error::ZeroOffDiagonal { .. } | Error::RootOnBoundary | Error::ImaginaryResidue { .. } => {
                JsStatus::Numerical
            }
            _ => JsStatus::Precondition,
        };
        Failure(status, e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure(JsStatus::Parse, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(JsStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, turning errors and panics into a status plus a stored message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> JsStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => JsStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            JsStatus::Panic
        }
    }
}

unsafe fn model<'a>(m: *const JsModel) -> Result<&'a Jacobi, Failure> {
    m.as_ref().map(|m| &m.inner).ok_or_else(|| null("model"))
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_json<T: serde::Serialize>(out: *mut *mut c_char, value: &T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    let text = serde_json::to_string(value)?;
    let c = CString::new(text).map_err(|e| Failure(JsStatus::Parse, e.to_string()))?;
    out.write(c.into_raw());
    Ok(())
}

fn scan_line(t0: f64, t1: f64, step: f64) -> ScanLine {
    ScanLine::real(t0, t1, step)
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn js_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses a JSON model file body into a new handle.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn js_model_from_json(json: *const c_char, out: *mut *mut JsModel) -> JsStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| Failure(JsStatus::InvalidUtf8, e.to_string()))?;
        let inner = Jacobi::from_json(text)?;
        write(out, Box::into_raw(Box::new(JsModel { inner })))
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `m` must come from `js_model_from_json` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn js_model_free(m: *mut JsModel) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn js_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Period `N` of the model.
///
/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn js_model_period(m: *const JsModel, out: *mut usize) -> JsStatus {
    guard(|| write(out, model(m)?.period()))
}

/// Coefficients `(a_n, b_n)`.
///
/// # Safety
/// `m` must be a live handle and `a`, `b` writable.
#[no_mangle]
pub unsafe extern "C" fn js_coeff(m: *const JsModel, n: usize, a: *mut JsComplex, b: *mut JsComplex) -> JsStatus {
    guard(|| {
        let (an, bn) = model(m)?.coeff(n)?;
        write(a, an.into())?;
        write(b, bn.into())
    })
}

/// `X_n(z) = B_{n+period-1} ··· B_n` for `n ≥ 1`.
///
/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn js_n_step(
    m: *const JsModel,
    n: usize,
    period: usize,
    z: JsComplex,
    out: *mut JsMatrix,
) -> JsStatus {
    guard(|| write(out, n_step(model(m)?, n, period, z.into())?.into()))
}

/// `(tr X)² − 4 det X`.
///
/// # Safety
/// `x` must be readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn js_discriminant(x: *const JsMatrix, out: *mut JsComplex) -> JsStatus {
    guard(|| {
        let x = x.as_ref().ok_or_else(|| null("matrix"))?;
        write(out, discriminant(&(*x).into()).into())
    })
}

/// Λ scan of the limit family at `offset` along the real grid
/// `t0:t1:step`, as JSON.
///
/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn js_lambda_scan(
    m: *const JsModel,
    offset: usize,
    t0: f64,
    t1: f64,
    step: f64,
    tol: f64,
    out: *mut *mut c_char,
) -> JsStatus {
    guard(|| {
        let family = LimitFamily::for_model(model(m)?, offset)?;
        let mut scan = lambda_scan(|z| family.at(z), scan_line(t0, t1, step), tol)?;
        scan.offset = Some(offset);
        write_json(out, &scan)
    })
}

/// Proper/improper classification from Λ scans on `t0:t1:step`, as JSON.
///
/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn js_classify(
    m: *const JsModel,
    t0: f64,
    t1: f64,
    step: f64,
    tol: f64,
    n_max: usize,
    out: *mut *mut c_char,
) -> JsStatus {
    guard(|| {
        let report = classify_model(model(m)?, scan_line(t0, t1, step), tol, n_max)?;
        write_json(out, &report)
    })
}

/// Summary of the Turán trace at `z` with `α = (1, 0)`, as JSON. A null
/// `gamma` means the scale is estimated from the coefficients.
///
/// # Safety
/// `m` must be a live handle, `gamma` null or readable, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn js_turan(
    m: *const JsModel,
    offset: usize,
    z: JsComplex,
    gamma: *const JsComplex,
    n_max: usize,
    out: *mut *mut c_char,
) -> JsStatus {
    guard(|| {
        let model = model(m)?;
        let period = model.period();
        let g = match gamma.as_ref() {
            Some(g) => (*g).into(),
            None => estimate_gamma(model, offset % period)?.gamma,
        };
        let alpha = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let trace = turan_trace(model, offset, period, g, z.into(), alpha, n_max)?;
        write_json(out, &trace.summary())
    })
}

/// Generalised eigenvector bound-ratio report at `z`, as JSON.
///
/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn js_bounds(
    m: *const JsModel,
    offset: usize,
    z: JsComplex,
    n_max: usize,
    out: *mut *mut c_char,
) -> JsStatus {
    guard(|| {
        let model = model(m)?;
        let report = bound_ratio(model, offset, model.period(), z.into(), n_max)?;
        write_json(out, &report)
    })
}

/// Eigenvalues of the `dim × dim` truncation inside a box, as JSON. A zero
/// `budget` selects the default.
///
/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn js_finite_section(
    m: *const JsModel,
    dim: usize,
    re0: f64,
    re1: f64,
    im0: f64,
    im1: f64,
    tol: f64,
    budget: usize,
    out: *mut *mut c_char,
) -> JsStatus {
    guard(|| {
        let region = BoxRegion::new(re0, re1, im0, im1)?;
        let mut opts = SectionOptions {
            tol,
            ..SectionOptions::default()
        };
        if budget > 0 {
            opts.budget = budget;
        }
        let est = finite_section(model(m)?, dim, region, opts)?;
        write_json(out, &est)
    })
}
