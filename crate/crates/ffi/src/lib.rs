//! C ABI for `lowerop`.
//!
//! Operators cross the boundary as opaque `LoOperator` handles; polynomials,
//! images and results cross as JSON strings in the same wire format the CLI
//! uses. Every function returns an `LoStatus`; on failure the message is
//! available from `lo_last_error` until the next call on the same thread.
//!
//! Strings returned through `out` parameters are owned by the caller and must
//! be released with `lo_string_free`. Handles must be released with
//! `lo_operator_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use lowerop::classify::{solve_k0, solve_k1, solve_k2};
use lowerop::{Error, OperatorJ, QPoly};
use serde_json::{json, Value};

/// Opaque operator handle.
pub struct LoOperator(OperatorJ);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    /// The library rejected the input; `lo_last_error` holds the error code
    /// and message.
    Domain = 4,
    Panic = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Fail(LoStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Parse(_) => LoStatus::Parse,
            _ => LoStatus::Domain,
        };
        Fail(status, format!("{}: {e}", e.code()))
    }
}

impl From<serde_json::Error> for Fail {
    fn from(e: serde_json::Error) -> Self {
        Fail(LoStatus::Parse, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> LoStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            LoStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            LoStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(Fail(LoStatus::NullPointer, "null string argument".into()));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| Fail(LoStatus::InvalidUtf8, e.to_string()))
}

unsafe fn read_op<'a>(op: *const LoOperator) -> Result<&'a OperatorJ, Fail> {
    op.as_ref()
        .map(|o| &o.0)
        .ok_or_else(|| Fail(LoStatus::NullPointer, "null operator handle".into()))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(LoStatus::NullPointer, "null out pointer".into()));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_op(out: *mut *mut LoOperator, j: OperatorJ) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(LoStatus::NullPointer, "null out pointer".into()));
    }
    out.write(Box::into_raw(Box::new(LoOperator(j))));
    Ok(())
}

unsafe fn write_json(out: *mut *mut c_char, v: &Value) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(LoStatus::NullPointer, "null out pointer".into()));
    }
    let s = CString::new(v.to_string()).expect("JSON has no interior NUL");
    out.write(s.into_raw());
    Ok(())
}

/// Parses an operator from JSON `{"N": n, "coeffs": [...]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lo_operator_from_json(json: *const c_char, out: *mut *mut LoOperator) -> LoStatus {
    guard(|| {
        let j: OperatorJ = serde_json::from_str(read_str(json)?)?;
        write_op(out, j)
    })
}

/// Builds the operator whose images of `1, x, ..., x^N` are the given JSON
/// array of polynomials.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lo_operator_from_images(json: *const c_char, out: *mut *mut LoOperator) -> LoStatus {
    guard(|| {
        let images: Vec<QPoly> = serde_json::from_str(read_str(json)?)?;
        write_op(out, OperatorJ::from_images(&images)?)
    })
}

/// # Safety
/// `op` must be null or a handle from this library that was not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lo_operator_free(op: *mut LoOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// # Safety
/// `op` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lo_operator_to_json(op: *const LoOperator, out: *mut *mut c_char) -> LoStatus {
    guard(|| write_json(out, &serde_json::to_value(read_op(op)?)?))
}

/// # Safety
/// `op` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lo_operator_horizon(op: *const LoOperator, out: *mut usize) -> LoStatus {
    guard(|| write_out(out, read_op(op)?.horizon()))
}

/// Applies the operator to a polynomial given as a JSON coefficient array,
/// lowest degree first.
///
/// # Safety
/// `op` must be a live handle, `poly` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lo_operator_apply(
    op: *const LoOperator,
    poly: *const c_char,
    out: *mut *mut c_char,
) -> LoStatus {
    guard(|| {
        let p: QPoly = serde_json::from_str(read_str(poly)?)?;
        let image = read_op(op)?.apply(&p)?;
        write_json(out, &serde_json::to_value(image)?)
    })
}

/// `outer ∘ inner`.
///
/// # Safety
/// Both handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lo_operator_compose(
    outer: *const LoOperator,
    inner: *const LoOperator,
    out: *mut *mut LoOperator,
) -> LoStatus {
    guard(|| {
        let c = read_op(outer)?.compose(read_op(inner)?);
        write_op(out, c)
    })
}

/// # Safety
/// `op` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lo_operator_invert(op: *const LoOperator, out: *mut *mut LoOperator) -> LoStatus {
    guard(|| {
        let inv = read_op(op)?.invert()?;
        write_op(out, inv)
    })
}

/// Writes the lowering order `k` to `out_k`.
///
/// # Safety
/// `op` must be a live handle; `out_k` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lo_operator_lowering_order(op: *const LoOperator, out_k: *mut usize) -> LoStatus {
    guard(|| {
        let profile = read_op(op)?.lowering_order()?;
        write_out(out_k, profile.order)
    })
}

/// Solves for the orthogonal sequence fixed by an order-`k` operator through
/// degree `n`. The result is JSON with keys `k`, `solution`, `lambdas`,
/// `structure` and `polys`.
///
/// # Safety
/// `op` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lo_solve(op: *const LoOperator, k: u32, n: usize, out: *mut *mut c_char) -> LoStatus {
    guard(|| {
        let j = read_op(op)?;
        let (solution, mps, lambdas) = match k {
            0 => {
                let (rep, mps, l) = solve_k0(j, n)?;
                (serde_json::to_value(rep)?, mps, l)
            }
            1 => {
                let (sol, mps, l) = solve_k1(j, n)?;
                (serde_json::to_value(sol)?, mps, l)
            }
            2 => {
                let (sol, mps, l) = solve_k2(j, n)?;
                (serde_json::to_value(sol)?, mps, l)
            }
            _ => return Err(Fail(LoStatus::Domain, format!("BadParameter: k = {k} is not 0, 1 or 2"))),
        };
        let v = json!({
            "k": k,
            "solution": solution,
            "lambdas": lambdas,
            "structure": mps.structure,
            "polys": mps.polys,
        });
        write_json(out, &v)
    })
}

/// # Safety
/// `s` must be null or a string returned by this library that was not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn lo_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the most recent failure on this thread, or an empty string.
/// The pointer stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn lo_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn lo_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version has an interior NUL"),
    };
    VERSION.as_ptr()
}
