//! C ABI for the qohno engine.
//!
//! Every entry point returns a [`QohnoStatus`]. Results come back through out
//! pointers as opaque handles or heap strings, which the caller releases with
//! the matching `*_free` function. On failure, [`qohno_last_error`] describes
//! what went wrong on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use qohno::suite::{run_suite, Suite, SuiteOptions, DEFAULT_SEED};
use qohno::{Error, Index, LambdaPoly, Params, Real};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QohnoStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    InvalidParams = 4,
    NotAdmissible = 5,
    NotConvergent = 6,
    BudgetExceeded = 7,
    EpsilonTooLarge = 8,
    Panic = 9,
}

/// Parameter set (q, ξ, η) together with precision and budget settings.
pub struct QohnoParams(Params);

/// A computed value with its rigorous absolute error budget.
pub struct QohnoReal {
    value: Real,
    bound: f64,
}

/// A truncated λ-polynomial in the letters x and y.
pub struct QohnoExpr(LambdaPoly);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> QohnoStatus {
    match e {
        Error::InvalidParams(_) | Error::EpsilonNotValidated => QohnoStatus::InvalidParams,
        Error::NotAdmissible(_) | Error::NonAdmissibleMonomial { .. } | Error::DivergencePrecondition { .. } => {
            QohnoStatus::NotAdmissible
        }
        Error::NonConvergent(_) | Error::SingularParameter { .. } => QohnoStatus::NotConvergent,
        Error::BudgetExceeded { .. } => QohnoStatus::BudgetExceeded,
        Error::EpsilonTooLarge(_) => QohnoStatus::EpsilonTooLarge,
        _ => QohnoStatus::InvalidArgument,
    }
}

struct Failure(QohnoStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> QohnoStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            QohnoStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            QohnoStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(QohnoStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(QohnoStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure(QohnoStatus::NullPointer, format!("{what} is null")))
}

unsafe fn index_arg(p: *const c_char, what: &str) -> Result<Index, Failure> {
    Ok(str_arg(p, what)?.parse::<Index>()?)
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(QohnoStatus::NullPointer, "output pointer is null".into()));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(QohnoStatus::NullPointer, "output pointer is null".into()));
    }
    *out = CString::new(s).unwrap_or_default().into_raw();
    Ok(())
}

/// Message for the most recent failure on this thread, or "" after a success.
/// The pointer stays valid until the next qohno call on the same thread.
#[no_mangle]
pub extern "C" fn qohno_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a string produced by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qohno_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Creates a parameter set from rational strings such as "1/2".
///
/// # Safety
/// The string arguments must be null or NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qohno_params_new(
    q: *const c_char,
    xi: *const c_char,
    eta: *const c_char,
    out: *mut *mut QohnoParams,
) -> QohnoStatus {
    guard(|| {
        let p = Params::from_strs(str_arg(q, "q")?, str_arg(xi, "xi")?, str_arg(eta, "eta")?)?;
        put(out, QohnoParams(p))
    })
}

/// # Safety
/// `p` must be null or a live handle from [`qohno_params_new`].
#[no_mangle]
pub unsafe extern "C" fn qohno_params_free(p: *mut QohnoParams) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// # Safety
/// `p` must be a live params handle.
#[no_mangle]
pub unsafe extern "C" fn qohno_params_set_prec_bits(p: *mut QohnoParams, bits: usize) -> QohnoStatus {
    guard(|| {
        let h = p.as_mut().ok_or_else(|| Failure(QohnoStatus::NullPointer, "params is null".into()))?;
        if bits < 64 {
            return Err(Failure(QohnoStatus::InvalidArgument, "precision must be at least 64 bits".into()));
        }
        h.0 = h.0.clone().with_prec_bits(bits);
        Ok(())
    })
}

/// # Safety
/// `p` must be a live params handle.
#[no_mangle]
pub unsafe extern "C" fn qohno_params_set_max_terms(p: *mut QohnoParams, cap: usize) -> QohnoStatus {
    guard(|| {
        let h = p.as_mut().ok_or_else(|| Failure(QohnoStatus::NullPointer, "params is null".into()))?;
        h.0 = h.0.clone().with_max_terms(cap);
        Ok(())
    })
}

/// # Safety
/// `p` must be a live params handle.
#[no_mangle]
pub unsafe extern "C" fn qohno_params_set_target_abs_err(p: *mut QohnoParams, err: f64) -> QohnoStatus {
    guard(|| {
        let h = p.as_mut().ok_or_else(|| Failure(QohnoStatus::NullPointer, "params is null".into()))?;
        if !(err > 0.0 && err.is_finite()) {
            return Err(Failure(QohnoStatus::InvalidArgument, "target error must be positive".into()));
        }
        h.0 = h.0.clone().with_target_abs_err(err);
        Ok(())
    })
}

/// ζ_q(k) for an index written like "2,1,3".
///
/// # Safety
/// `p` must be a live params handle, `index` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qohno_zeta(
    p: *const QohnoParams,
    index: *const c_char,
    out: *mut *mut QohnoReal,
) -> QohnoStatus {
    guard(|| {
        let ev = qohno::zeta_q(&index_arg(index, "index")?, &ref_arg(p, "params")?.0)?;
        put(out, QohnoReal { value: ev.value, bound: ev.budget.total() })
    })
}

/// The generating function O(k).
///
/// # Safety
/// Same contract as [`qohno_zeta`].
#[no_mangle]
pub unsafe extern "C" fn qohno_big_o(
    p: *const QohnoParams,
    index: *const c_char,
    out: *mut *mut QohnoReal,
) -> QohnoStatus {
    guard(|| {
        let ev = qohno::big_o(&index_arg(index, "index")?, &ref_arg(p, "params")?.0)?;
        put(out, QohnoReal { value: ev.value, bound: ev.budget.total() })
    })
}

/// The Ohno sum O_{e1,e2}(k).
///
/// # Safety
/// Same contract as [`qohno_zeta`].
#[no_mangle]
pub unsafe extern "C" fn qohno_ohno_sum(
    p: *const QohnoParams,
    index: *const c_char,
    e1: u32,
    e2: u32,
    out: *mut *mut QohnoReal,
) -> QohnoStatus {
    guard(|| {
        let ev = qohno::ohno_sum(&index_arg(index, "index")?, e1, e2, &ref_arg(p, "params")?.0)?;
        put(out, QohnoReal { value: ev.value, bound: ev.budget.total() })
    })
}

/// The connected sum Z(k;l). Either index may be the empty string.
///
/// # Safety
/// Same contract as [`qohno_zeta`].
#[no_mangle]
pub unsafe extern "C" fn qohno_connected_sum(
    p: *const QohnoParams,
    k: *const c_char,
    l: *const c_char,
    out: *mut *mut QohnoReal,
) -> QohnoStatus {
    guard(|| {
        let ev = qohno::connected_sum(&index_arg(k, "k")?, &index_arg(l, "l")?, &ref_arg(p, "params")?.0)?;
        put(out, QohnoReal { value: ev.value, bound: ev.budget.total() })
    })
}

/// O(y w x) for a λ-polynomial w. Validates ε on the parameter set first.
///
/// # Safety
/// `p` and `w` must be live handles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qohno_big_o_word(
    p: *mut QohnoParams,
    w: *const QohnoExpr,
    out: *mut *mut QohnoReal,
) -> QohnoStatus {
    guard(|| {
        let h = p.as_mut().ok_or_else(|| Failure(QohnoStatus::NullPointer, "params is null".into()))?;
        let w = ref_arg(w, "expression")?;
        qohno::validate_epsilon(&mut h.0)?;
        let ev = qohno::big_o_word(&w.0, &h.0)?;
        put(out, QohnoReal { value: ev.value, bound: ev.budget.total() })
    })
}

/// # Safety
/// `r` must be a live value handle.
#[no_mangle]
pub unsafe extern "C" fn qohno_real_to_f64(r: *const QohnoReal) -> f64 {
    r.as_ref().map_or(f64::NAN, |r| r.value.to_f64())
}

/// Absolute error budget of a computed value.
///
/// # Safety
/// `r` must be a live value handle.
#[no_mangle]
pub unsafe extern "C" fn qohno_real_error_bound(r: *const QohnoReal) -> f64 {
    r.as_ref().map_or(f64::NAN, |r| r.bound)
}

/// Full-precision decimal rendering; free with [`qohno_string_free`].
///
/// # Safety
/// `r` must be a live value handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qohno_real_to_string(r: *const QohnoReal, out: *mut *mut c_char) -> QohnoStatus {
    guard(|| put_string(out, ref_arg(r, "value")?.value.to_decimal_string()))
}

/// # Safety
/// `r` must be null or a live value handle.
#[no_mangle]
pub unsafe extern "C" fn qohno_real_free(r: *mut QohnoReal) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Parses an expression such as "x R + 1/2 y L", truncated at λ-degree `order`.
///
/// # Safety
/// `text` must be NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qohno_expr_parse(text: *const c_char, order: usize, out: *mut *mut QohnoExpr) -> QohnoStatus {
    guard(|| put(out, QohnoExpr(qohno::parse_expr(str_arg(text, "expression")?, order)?)))
}

/// The anti-automorphism τ applied to `w`.
///
/// # Safety
/// `w` must be a live expression handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qohno_expr_tau(w: *const QohnoExpr, out: *mut *mut QohnoExpr) -> QohnoStatus {
    guard(|| put(out, QohnoExpr(ref_arg(w, "expression")?.0.tau())))
}

/// # Safety
/// `w` must be a live expression handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qohno_expr_to_string(w: *const QohnoExpr, out: *mut *mut c_char) -> QohnoStatus {
    guard(|| put_string(out, ref_arg(w, "expression")?.0.to_string()))
}

/// # Safety
/// `w` must be null or a live expression handle.
#[no_mangle]
pub unsafe extern "C" fn qohno_expr_free(w: *mut QohnoExpr) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

/// The dual of an admissible index, written like "1,2".
///
/// # Safety
/// `index` must be NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qohno_dual(index: *const c_char, out: *mut *mut c_char) -> QohnoStatus {
    guard(|| put_string(out, index_arg(index, "index")?.dual()?.to_string()))
}

/// Runs a named suite and returns its JSON report. `passed` receives whether
/// every case passed. `max_weight` of 0 and `seed` of 0 select the defaults.
///
/// # Safety
/// `p` must be a live params handle, `name` NUL-terminated, `json` and
/// `passed` writable.
#[no_mangle]
pub unsafe extern "C" fn qohno_run_suite(
    p: *const QohnoParams,
    name: *const c_char,
    lambda_order: usize,
    max_weight: u32,
    seed: u64,
    json: *mut *mut c_char,
    passed: *mut bool,
) -> QohnoStatus {
    guard(|| {
        let params = &ref_arg(p, "params")?.0;
        let suite: Suite = str_arg(name, "suite name")?.parse()?;
        if passed.is_null() {
            return Err(Failure(QohnoStatus::NullPointer, "output pointer is null".into()));
        }
        let opts = SuiteOptions {
            max_weight: (max_weight > 0).then_some(max_weight),
            lambda_order,
            seed: if seed == 0 { DEFAULT_SEED } else { seed },
            ..SuiteOptions::default()
        };
        let report = run_suite(suite, params, &opts);
        put_string(json, report.to_json())?;
        *passed = report.passed();
        Ok(())
    })
}
