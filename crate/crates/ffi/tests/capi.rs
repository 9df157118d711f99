use std::ffi::{CStr, CString};
use std::ptr;

use scalar_spectral_ffi::*;
use serde_json::Value;

struct Op(*mut SspOperator);

impl Op {
    fn new(spec: &str) -> Self {
        let spec = CString::new(spec).unwrap();
        let mut op = ptr::null_mut();
        let status = unsafe { ssp_operator_from_json(spec.as_ptr(), &mut op) };
        assert_eq!(status, SspStatus::Ok, "{}", last_error());
        Op(op)
    }
}

impl Drop for Op {
    fn drop(&mut self) {
        unsafe { ssp_operator_free(self.0) }
    }
}

const EXAMPLE3: &str = r#"{"model": "diagonal", "p": 2, "prepend": [{"re": 0, "im": 0}], "tail_expr": "1/n", "limit_points": [{"re": 0, "im": 0}]}"#;
const SHIFTED: &str = r#"{"model": "diagonal", "p": 2, "prepend": [{"re": 0, "im": 0}], "tail_expr": "1 + 1/n", "limit_points": [{"re": 1, "im": 0}]}"#;

fn last_error() -> String {
    let p = ssp_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn take(s: *mut std::ffi::c_char) -> Value {
    let v = serde_json::from_str(unsafe { CStr::from_ptr(s) }.to_str().unwrap()).unwrap();
    unsafe { ssp_string_free(s) };
    v
}

#[test]
fn lambda_eval() {
    let e = CString::new("1 + 1/n").unwrap();
    let (mut re, mut im) = (0.0, 0.0);
    assert_eq!(unsafe { ssp_lambda_eval(e.as_ptr(), 4, &mut re, &mut im) }, SspStatus::Ok);
    assert_eq!((re, im), (1.25, 0.0));
    assert!(ssp_last_error().is_null());

    let bad = CString::new("1 + * n").unwrap();
    assert_eq!(unsafe { ssp_lambda_eval(bad.as_ptr(), 1, &mut re, &mut im) }, SspStatus::InvalidArgument);
    assert!(last_error().contains('4'));
}

#[test]
fn classify() {
    let op = Op::new(EXAMPLE3);
    let mut v = SspVerdict::Resolvent;
    assert_eq!(unsafe { ssp_classify_point(op.0, 0.0, 0.0, 100, &mut v) }, SspStatus::Ok);
    assert_eq!(v, SspVerdict::Point);
    assert_eq!(unsafe { ssp_classify_point(op.0, -1.0, 0.0, 100, &mut v) }, SspStatus::Ok);
    assert_eq!(v, SspVerdict::Resolvent);

    let shift = Op::new(r#"{"model": "weighted_shift"}"#);
    assert_eq!(unsafe { ssp_classify_point(shift.0, 0.0, 0.0, 10, &mut v) }, SspStatus::Ok);
    assert_eq!(v, SspVerdict::Residual);
}

#[test]
fn gap_check() {
    let op = Op::new(SHIFTED);
    let mut g = SspGapSummary::default();
    let mut report = ptr::null_mut();
    assert_eq!(unsafe { ssp_gap_check(op.0, 20, 1, &mut g, &mut report) }, SspStatus::Ok);
    assert!(g.isolated && g.range_closed && g.predicates_agree && g.is_eigenvalue);
    assert_eq!(g.restriction_inverse_norm, 1.0);
    assert_eq!(take(report)["proof_identity_deviation"], 0.0);

    let op = Op::new(EXAMPLE3);
    assert_eq!(unsafe { ssp_gap_check(op.0, 20, 1, &mut g, ptr::null_mut()) }, SspStatus::Ok);
    assert!(!g.isolated && !g.range_closed && g.predicates_agree);
    assert_eq!(g.restriction_inverse_norm, f64::INFINITY);

    let invertible = Op::new(r#"{"model": "diagonal", "prepend": [], "tail_expr": "n", "p": 2, "limit_points": []}"#);
    assert_eq!(unsafe { ssp_gap_check(invertible.0, 20, 1, &mut g, ptr::null_mut()) }, SspStatus::NotApplicable);
}

#[test]
fn apply_function_and_reducible_inverse() {
    let op = Op::new(SHIFTED);
    let f = CString::new("reciprocal_cutoff(0.5)").unwrap();
    let x = CString::new(r#"{"1": 1, "2": 2}"#).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { ssp_apply_function(op.0, f.as_ptr(), x.as_ptr(), &mut out) }, SspStatus::Ok);
    let v = take(out);
    assert!(v["value"].get("1").is_none());
    assert_eq!(v["value"]["2"]["re"], 1.0);

    assert_eq!(unsafe { ssp_reducible_inverse(op.0, x.as_ptr(), &mut out) }, SspStatus::Ok);
    let v = take(out);
    assert_eq!(v["y"]["1"]["re"], 1.0);
    assert_eq!(v["y"]["2"]["re"], 1.0);
    assert_eq!(v["residual"], 0.0);

    let e3 = Op::new(EXAMPLE3);
    assert_eq!(unsafe { ssp_reducible_inverse(e3.0, x.as_ptr(), &mut out) }, SspStatus::NotApplicable);
    assert!(last_error().contains("precondition"));
}

#[test]
fn errors() {
    let mut op = ptr::null_mut();
    assert_eq!(unsafe { ssp_operator_from_json(ptr::null(), &mut op) }, SspStatus::NullPointer);
    let bad = CString::new(r#"{"model": "diagonal"}"#).unwrap();
    assert_eq!(unsafe { ssp_operator_from_json(bad.as_ptr(), &mut op) }, SspStatus::InvalidSpec);
    assert!(op.is_null());
    let invalid = [0xffu8, 0];
    assert_eq!(unsafe { ssp_operator_from_json(invalid.as_ptr().cast(), &mut op) }, SspStatus::InvalidUtf8);

    let mut v = SspVerdict::Resolvent;
    assert_eq!(unsafe { ssp_classify_point(ptr::null(), 0.0, 0.0, 10, &mut v) }, SspStatus::NullPointer);

    let shift = Op::new(r#"{"model": "weighted_shift"}"#);
    let x = CString::new("[1]").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { ssp_reducible_inverse(shift.0, x.as_ptr(), &mut out) }, SspStatus::NotApplicable);

    let op = Op::new(SHIFTED);
    let f = CString::new("no_such_function()").unwrap();
    assert_eq!(unsafe { ssp_apply_function(op.0, f.as_ptr(), x.as_ptr(), &mut out) }, SspStatus::InvalidArgument);
    let bad_vec = CString::new(r#"{"0": 1}"#).unwrap();
    let id = CString::new("identity").unwrap();
    assert_eq!(unsafe { ssp_apply_function(op.0, id.as_ptr(), bad_vec.as_ptr(), &mut out) }, SspStatus::InvalidArgument);

    unsafe {
        ssp_operator_free(ptr::null_mut());
        ssp_string_free(ptr::null_mut());
    }
}

#[test]
fn header_is_current() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/scalar_spectral.h")).unwrap();
    for name in ["ssp_operator_from_json", "ssp_operator_free", "ssp_classify_point", "ssp_gap_check", "ssp_lambda_eval", "ssp_apply_function", "ssp_reducible_inverse", "ssp_string_free", "ssp_last_error", "SSP_STATUS_INCONCLUSIVE"] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
