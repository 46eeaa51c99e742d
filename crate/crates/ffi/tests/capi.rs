use std::ffi::{CStr, CString};
use std::ptr;

use jacobi_spectra_ffi::*;
use serde_json::Value;

const FREE: &str = r#"{"model": {"kind": "AsymptoticallyPeriodic", "period": 1, "alpha": [[1, 0]], "beta": [[0, 0]]}}"#;
const PERIOD2: &str = r#"{"model": {"kind": "AsymptoticallyPeriodic", "period": 2, "alpha": [[1, 0], [2, 0]], "beta": [[0, 0], [0, 0]]}}"#;

fn c(z: f64) -> JsComplex {
    JsComplex { re: z, im: 0.0 }
}

fn load(json: &str) -> *mut JsModel {
    let text = CString::new(json).unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { js_model_from_json(text.as_ptr(), &mut m) }, JsStatus::Ok);
    assert!(!m.is_null());
    m
}

fn last_error() -> String {
    let p = js_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn take(s: *mut std::ffi::c_char) -> Value {
    assert!(!s.is_null());
    let v = serde_json::from_str(unsafe { CStr::from_ptr(s) }.to_str().unwrap()).unwrap();
    unsafe { js_string_free(s) };
    v
}

#[test]
fn coefficients_and_transfer_matrix() {
    let m = load(PERIOD2);
    let mut period = 0;
    let (mut a, mut b) = (c(0.0), c(0.0));
    unsafe {
        assert_eq!(js_model_period(m, &mut period), JsStatus::Ok);
        assert_eq!(js_coeff(m, 1, &mut a, &mut b), JsStatus::Ok);
    }
    assert_eq!(period, 2);
    assert_eq!((a, b), (c(2.0), c(0.0)));

    // Free model: B_n(z) = [[0, 1], [-1, z]], so det X = 1 and tr X_1 = z.
    let f = load(FREE);
    let mut x = JsMatrix {
        m11: c(0.0),
        m12: c(0.0),
        m21: c(0.0),
        m22: c(0.0),
    };
    let mut d = c(0.0);
    unsafe {
        assert_eq!(js_n_step(f, 1, 1, c(0.5), &mut x), JsStatus::Ok);
        assert_eq!(js_discriminant(&x, &mut d), JsStatus::Ok);
    }
    assert_eq!((x.m11, x.m12, x.m21, x.m22), (c(0.0), c(1.0), c(-1.0), c(0.5)));
    assert!((d.re - (0.25 - 4.0)).abs() < 1e-15 && d.im == 0.0);
    unsafe {
        js_model_free(m);
        js_model_free(f);
    }
}

#[test]
fn reports_as_json() {
    let m = load(FREE);
    let mut out = ptr::null_mut();

    assert_eq!(
        unsafe { js_lambda_scan(m, 0, -4.0, 4.0, 0.001, 1e-8, &mut out) },
        JsStatus::Ok
    );
    let scan = take(out);
    let iv = &scan["intervals"][0];
    assert!((iv["left"].as_f64().unwrap() + 2.0).abs() < 1e-3, "{scan}");
    assert!((iv["right"].as_f64().unwrap() - 2.0).abs() < 1e-3, "{scan}");

    assert_eq!(
        unsafe { js_turan(m, 0, c(0.3), ptr::null(), 2000, &mut out) },
        JsStatus::Ok
    );
    let t = take(out);
    assert!((t["g"].as_f64().unwrap() - 1.0).abs() < 1e-12, "{t}");

    let gamma = c(1.0);
    assert_eq!(unsafe { js_turan(m, 0, c(0.3), &gamma, 2000, &mut out) }, JsStatus::Ok);
    assert_eq!(take(out)["sign_change"], Value::Bool(false));

    assert_eq!(unsafe { js_bounds(m, 0, c(0.5), 2000, &mut out) }, JsStatus::Ok);
    let b = take(out);
    let (lo, hi) = (
        b["window"]["ln_inf"].as_f64().unwrap(),
        b["window"]["ln_sup"].as_f64().unwrap(),
    );
    assert!(lo.is_finite() && hi >= lo, "{b}");

    assert_eq!(
        unsafe { js_classify(m, -4.0, 4.0, 0.01, 1e-8, 2000, &mut out) },
        JsStatus::Ok
    );
    assert!(take(out)["verdict"].is_string());

    assert_eq!(
        unsafe { js_finite_section(m, 5, -3.0, 3.0, -0.5, 0.7, 1e-10, 0, &mut out) },
        JsStatus::Ok
    );
    let fs = take(out);
    let roots = fs["roots"].as_array().unwrap();
    assert_eq!(roots.len(), 5);
    for r in roots {
        let re = r["z"][0].as_f64().unwrap();
        // Eigenvalues of the free section are 2 cos(jπ/6).
        assert!(
            (1..=5).any(|j| (re - 2.0 * (j as f64 * std::f64::consts::PI / 6.0).cos()).abs() < 1e-9),
            "{fs}"
        );
    }
    unsafe { js_model_free(m) };
}

#[test]
fn errors_set_status_and_message() {
    let mut m = ptr::null_mut();
    let bad = CString::new("{not json").unwrap();
    assert_eq!(unsafe { js_model_from_json(bad.as_ptr(), &mut m) }, JsStatus::Parse);
    assert!(m.is_null());
    assert!(!last_error().is_empty());

    assert_eq!(
        unsafe { js_model_from_json(ptr::null(), &mut m) },
        JsStatus::NullPointer
    );
    assert!(last_error().contains("null"));

    let zero = r#"{"model": {"kind": "AsymptoticallyPeriodic", "period": 1, "alpha": [[0, 0]], "beta": [[0, 0]]}}"#;
    let text = CString::new(zero).unwrap();
    assert_ne!(unsafe { js_model_from_json(text.as_ptr(), &mut m) }, JsStatus::Ok);

    let f = load(FREE);
    let mut x = JsMatrix {
        m11: c(0.0),
        m12: c(0.0),
        m21: c(0.0),
        m22: c(0.0),
    };
    assert_eq!(unsafe { js_n_step(f, 0, 1, c(0.0), &mut x) }, JsStatus::Precondition);
    assert_eq!(
        unsafe { js_coeff(ptr::null(), 0, ptr::null_mut(), ptr::null_mut()) },
        JsStatus::NullPointer
    );

    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { js_lambda_scan(f, 7, -1.0, 1.0, 0.1, 1e-8, &mut out) },
        JsStatus::Precondition
    );
    assert!(out.is_null());
    assert_eq!(
        unsafe { js_finite_section(f, 4, 1.0, -1.0, 0.0, 1.0, 1e-10, 0, &mut out) },
        JsStatus::Precondition
    );

    // A successful call clears the message.
    let mut p = 0;
    assert_eq!(unsafe { js_model_period(f, &mut p) }, JsStatus::Ok);
    assert!(js_last_error().is_null());
    unsafe {
        js_model_free(f);
        js_model_free(ptr::null_mut());
        js_string_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/jacobi_spectra.h")).unwrap();
    let src = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/src/lib.rs")).unwrap();
    let exports: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 12);
    for name in exports {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
    assert!(header.contains("typedef struct JsModel JsModel;"));
}
