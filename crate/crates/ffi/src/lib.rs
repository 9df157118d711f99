//! C interface to `scalar-spectral`.
//!
//! Every fallible function returns an [`SspStatus`]; on anything but
//! `SSP_OK` the message is available from [`ssp_last_error`] until the next
//! call on the same thread. Strings handed out by the library are released
//! with [`ssp_string_free`], operators with [`ssp_operator_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use scalar_spectral::calculus::apply_function;
use scalar_spectral::cli::{gap_json, load_operator, operator_norm};
use scalar_spectral::expr::parse_lambda_expr;
use scalar_spectral::function::BorelFunction;
use scalar_spectral::gap::{gap_theorem_check, reducible_inverse, GapError};
use scalar_spectral::models::{Operator, ScalarOperator};
use scalar_spectral::sampling::random_vectors;
use scalar_spectral::spectrum::{classify_point, Verdict};
use scalar_spectral::vector::{vector_to_json, FiniteVector, VectorJson};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SspStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidSpec = 3,
    InvalidArgument = 4,
    /// The operator is not of scalar type, or a precondition such as `0 ∈ σ(A)` fails.
    NotApplicable = 5,
    /// A certificate could not be produced at the configured truncation.
    Inconclusive = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SspVerdict {
    Resolvent = 0,
    Point = 1,
    Continuous = 2,
    Residual = 3,
}

/// Flat view of a spectral-gap check; infinite norms are `INFINITY`.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SspGapSummary {
    pub isolated: bool,
    pub range_closed: bool,
    pub predicates_agree: bool,
    pub is_eigenvalue: bool,
    pub gap_radius: f64,
    pub inf_nonzero_modulus: f64,
    pub restriction_inverse_norm: f64,
}

/// Opaque operator handle.
pub struct SspOperator {
    inner: Operator,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

struct Failure(SspStatus, String);

impl Failure {
    fn arg(msg: impl Into<String>) -> Self {
        Failure(SspStatus::InvalidArgument, msg.into())
    }
}

impl From<GapError> for Failure {
    fn from(e: GapError) -> Self {
        let status = match &e {
            _ if e.is_inconclusive() => SspStatus::Inconclusive,
            GapError::ZeroNotInSpectrum | GapError::PreconditionViolation(_) => SspStatus::NotApplicable,
            _ => SspStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn guard<F>(f: F) -> SspStatus
where
    F: FnOnce() -> Result<(), Failure>,
{
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SspStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            SspStatus::Panic
        }
    }
}

unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(Failure(SspStatus::NullPointer, "null string argument".into()));
    }
    CStr::from_ptr(s).to_str().map_err(|_| Failure(SspStatus::InvalidUtf8, "argument is not UTF-8".into()))
}

unsafe fn handle<'a>(op: *const SspOperator) -> Result<&'a Operator, Failure> {
    op.as_ref().map(|h| &h.inner).ok_or_else(|| Failure(SspStatus::NullPointer, "null operator handle".into()))
}

fn scalar(op: &Operator) -> Result<ScalarOperator<'_>, Failure> {
    op.as_scalar().ok_or_else(|| Failure(SspStatus::NotApplicable, format!("{} is not of scalar type", op.model_name())))
}

fn out<T>(slot: *mut T, value: T) -> Result<(), Failure> {
    if slot.is_null() {
        return Err(Failure(SspStatus::NullPointer, "null output pointer".into()));
    }
    unsafe { slot.write(value) };
    Ok(())
}

fn out_string(slot: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|_| Failure::arg("output contains NUL"))?;
    if slot.is_null() {
        return Err(Failure(SspStatus::NullPointer, "null output pointer".into()));
    }
    unsafe { slot.write(c.into_raw()) };
    Ok(())
}

fn vector(src: &str) -> Result<FiniteVector, Failure> {
    let v: VectorJson = serde_json::from_str(src).map_err(|e| Failure::arg(format!("invalid vector JSON: {e}")))?;
    v.to_vector().map_err(|e| Failure::arg(format!("invalid vector: {e}")))
}

/// Message for the last failed call on this thread, or NULL. Owned by the library.
#[no_mangle]
pub extern "C" fn ssp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ssp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds an operator from its JSON spec.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out_op` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ssp_operator_from_json(json: *const c_char, out_op: *mut *mut SspOperator) -> SspStatus {
    guard(|| {
        let src = text(json)?;
        let inner = load_operator(src, None).map_err(|e| Failure(SspStatus::InvalidSpec, e))?;
        out(out_op, Box::into_raw(Box::new(SspOperator { inner })))
    })
}

/// # Safety
/// `op` must be NULL or a handle from [`ssp_operator_from_json`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ssp_operator_free(op: *mut SspOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// Exact value of `λ(n)` for an expression in `n`.
///
/// # Safety
/// `expr` must be a NUL-terminated string; `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ssp_lambda_eval(expr: *const c_char, n: u64, re: *mut f64, im: *mut f64) -> SspStatus {
    guard(|| {
        let e = parse_lambda_expr(text(expr)?).map_err(|e| Failure::arg(e.to_string()))?;
        let z = e.eval(n).map_err(|e| Failure::arg(e.to_string()))?;
        out(re, z.re)?;
        out(im, z.im)
    })
}

/// Classifies `λ = re + i·im`, looking `truncation` indices into a diagonal tail.
///
/// # Safety
/// `op` must be a live handle; `verdict` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ssp_classify_point(
    op: *const SspOperator,
    re: f64,
    im: f64,
    truncation: u64,
    verdict: *mut SspVerdict,
) -> SspStatus {
    guard(|| {
        let op = handle(op)?;
        let c = classify_point(op, Complex64::new(re, im), truncation).map_err(|e| Failure(SspStatus::Inconclusive, e.to_string()))?;
        let v = match c.verdict {
            Verdict::Resolvent => SspVerdict::Resolvent,
            Verdict::Point => SspVerdict::Point,
            Verdict::Continuous => SspVerdict::Continuous,
            Verdict::Residual => SspVerdict::Residual,
        };
        out(verdict, v)
    })
}

/// Isolation of `0` against closedness of the range, with `samples` random
/// vectors drawn from `seed` for the proof identity. `report_json` may be NULL.
///
/// # Safety
/// `op` must be a live handle; `summary` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ssp_gap_check(
    op: *const SspOperator,
    samples: u32,
    seed: u64,
    summary: *mut SspGapSummary,
    report_json: *mut *mut c_char,
) -> SspStatus {
    guard(|| {
        let op = scalar(handle(op)?)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xs = match op {
            ScalarOperator::Diagonal(_) => random_vectors(&mut rng, samples as usize, 64, 8),
            ScalarOperator::Finite(f) => random_vectors(&mut rng, samples as usize, f.dimension() as u64, f.dimension()),
        };
        let g = gap_theorem_check(op, &xs)?;
        out(
            summary,
            SspGapSummary {
                isolated: g.isolated,
                range_closed: g.range_closed,
                predicates_agree: g.predicates_agree,
                is_eigenvalue: g.is_eigenvalue,
                gap_radius: g.gap_radius,
                inf_nonzero_modulus: g.inf_nonzero_modulus,
                restriction_inverse_norm: g.restriction_inverse_norm,
            },
        )?;
        if report_json.is_null() {
            return Ok(());
        }
        out_string(report_json, gap_json(&g).to_string())
    })
}

/// `F(A)x` for a function descriptor such as `reciprocal_cutoff(0.5)` and a
/// JSON vector (`[..]` dense or `{"k": ..}` sparse). The result is
/// `{"value": {..}, "converged_at": n}`.
///
/// # Safety
/// `op` must be a live handle, the strings NUL-terminated and `result_json` writable.
#[no_mangle]
pub unsafe extern "C" fn ssp_apply_function(
    op: *const SspOperator,
    function: *const c_char,
    vector_json: *const c_char,
    result_json: *mut *mut c_char,
) -> SspStatus {
    guard(|| {
        let op = scalar(handle(op)?)?;
        let f: BorelFunction = text(function)?.parse().map_err(|e: scalar_spectral::function::FunctionError| Failure::arg(e.to_string()))?;
        let x = vector(text(vector_json)?)?;
        let r = apply_function(op, &f, &x).map_err(|e| Failure::arg(e.to_string()))?;
        out_string(result_json, json!({ "value": vector_to_json(&r.value), "converged_at": r.converged_at }).to_string())
    })
}

/// Solves `(A + E({0}))y = x`. The result is
/// `{"y": {..}, "residual": r, "inverse_norm_bound": b}`.
///
/// # Safety
/// `op` must be a live handle, `vector_json` NUL-terminated and `result_json` writable.
#[no_mangle]
pub unsafe extern "C" fn ssp_reducible_inverse(
    op: *const SspOperator,
    vector_json: *const c_char,
    result_json: *mut *mut c_char,
) -> SspStatus {
    guard(|| {
        let op = scalar(handle(op)?)?;
        let x = vector(text(vector_json)?)?;
        let r = reducible_inverse(op, &x)?;
        out_string(
            result_json,
            json!({
                "y": vector_to_json(&r.y),
                "residual": r.residual,
                "inverse_norm_bound": operator_norm(r.inverse_norm_bound),
            })
            .to_string(),
        )
    })
}
