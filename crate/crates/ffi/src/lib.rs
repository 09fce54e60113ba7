//! C ABI over the affinor-rank library.
//!
//! Inputs and results cross the boundary as UTF-8 JSON in the same formats
//! the command-line tool reads and writes. Every function returns an
//! [`ArStatus`]; on failure [`ar_last_error_message`] describes the error for
//! the calling thread. Strings returned through `out` pointers are owned by
//! the caller and released with [`ar_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use affinor_rank::algebra::StructureConstants;
use affinor_rank::frobenius::frobenius_iff_generic_rank;
use affinor_rank::hullrank::{
    certify_generic_rank, verify_certificate, weak_rank_witness, AffinorBasis, RankCertificate, SearchOptions,
};

/// Result codes. Zero is success.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidData = 4,
    Panic = 5,
}

/// Opaque handle to a validated affinor basis.
pub struct ArBasis(AffinorBasis);

/// Opaque handle to a validated algebra given by structure constants.
pub struct ArAlgebra(StructureConstants);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

struct Failure(ArStatus, String);

/// Runs `f`, records its error message and converts panics into
/// [`ArStatus::Panic`].
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> ArStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            ArStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            ArStatus::Panic
        }
    }
}

/// # Safety
/// `ptr` is null or a NUL-terminated string valid for reads.
unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, Failure> {
    if ptr.is_null() {
        return Err(Failure(ArStatus::NullPointer, "null input string".into()));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|e| Failure(ArStatus::InvalidUtf8, e.to_string()))
}

/// # Safety
/// `out` is null or valid for one pointer write.
unsafe fn write_json<T: serde::Serialize + ?Sized>(out: *mut *mut c_char, value: &T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(ArStatus::NullPointer, "null output pointer".into()));
    }
    let text = serde_json::to_string(value).map_err(|e| Failure(ArStatus::InvalidData, e.to_string()))?;
    let c = CString::new(text).map_err(|e| Failure(ArStatus::InvalidData, e.to_string()))?;
    *out = c.into_raw();
    Ok(())
}

fn deref<'a, T>(ptr: *const T) -> Result<&'a T, Failure> {
    // SAFETY: callers pass handles produced by this library or null.
    unsafe { ptr.as_ref() }.ok_or_else(|| Failure(ArStatus::NullPointer, "null handle".into()))
}

fn options(seed: u64, trials: usize) -> SearchOptions {
    let mut opts = SearchOptions::default();
    opts.seed = seed;
    if trials > 0 {
        opts.trials = trials;
    }
    opts
}

/// Message for the last failed call on this thread, or null after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn ar_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ar_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` is null or was returned through an `out_json` parameter and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ar_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses and validates an affinor basis from JSON.
///
/// # Safety
/// `json` is a NUL-terminated string; `out` is valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn ar_basis_from_json(json: *const c_char, out: *mut *mut ArBasis) -> ArStatus {
    guard(|| {
        let text = read_str(json)?;
        if out.is_null() {
            return Err(Failure(ArStatus::NullPointer, "null output pointer".into()));
        }
        let basis = AffinorBasis::from_json_str(text).map_err(|e| Failure(ArStatus::Parse, e.to_string()))?;
        *out = Box::into_raw(Box::new(ArBasis(basis)));
        Ok(())
    })
}

/// Releases a basis handle. Null is ignored.
///
/// # Safety
/// `basis` is null or a live handle from [`ar_basis_from_json`].
#[no_mangle]
pub unsafe extern "C" fn ar_basis_free(basis: *mut ArBasis) {
    if !basis.is_null() {
        drop(Box::from_raw(basis));
    }
}

/// Writes the ambient dimension `m` and the basis size `n`.
///
/// # Safety
/// `basis` is a live handle; `m` and `n` are valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ar_basis_dims(basis: *const ArBasis, m: *mut usize, n: *mut usize) -> ArStatus {
    guard(|| {
        let b = &deref(basis)?.0;
        if m.is_null() || n.is_null() {
            return Err(Failure(ArStatus::NullPointer, "null output pointer".into()));
        }
        *m = b.m();
        *n = b.n();
        Ok(())
    })
}

/// Searches for a weak rank witness. `trials == 0` keeps the default budget.
/// Writes the outcome as JSON.
///
/// # Safety
/// `basis` is a live handle; `out_json` is valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn ar_weak_rank(
    basis: *const ArBasis,
    seed: u64,
    trials: usize,
    out_json: *mut *mut c_char,
) -> ArStatus {
    guard(|| {
        let b = &deref(basis)?.0;
        write_json(out_json, &weak_rank_witness(b, &options(seed, trials)))
    })
}

/// Certifies the generic rank. `trials == 0` keeps the default budget.
/// Writes the outcome as JSON.
///
/// # Safety
/// `basis` is a live handle; `out_json` is valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn ar_generic_rank(
    basis: *const ArBasis,
    seed: u64,
    trials: usize,
    out_json: *mut *mut c_char,
) -> ArStatus {
    guard(|| {
        let b = &deref(basis)?.0;
        write_json(out_json, &certify_generic_rank(b, &options(seed, trials)))
    })
}

/// Re-checks a rank certificate given as JSON. Writes 1 to `valid` when every
/// check passes, else 0, and the audit as JSON to `out_json` when non-null.
///
/// # Safety
/// `json` is a NUL-terminated string; `valid` is valid for a write;
/// `out_json` is null or valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn ar_verify_certificate(
    json: *const c_char,
    valid: *mut i32,
    out_json: *mut *mut c_char,
) -> ArStatus {
    guard(|| {
        let text = read_str(json)?;
        if valid.is_null() {
            return Err(Failure(ArStatus::NullPointer, "null output pointer".into()));
        }
        let cert: RankCertificate =
            serde_json::from_str(text).map_err(|e| Failure(ArStatus::Parse, e.to_string()))?;
        let audit = verify_certificate(&cert);
        *valid = i32::from(audit.valid);
        if !out_json.is_null() {
            write_json(out_json, &audit)?;
        }
        Ok(())
    })
}

/// Parses structure constants `{"n", "C"}` from JSON.
///
/// # Safety
/// `json` is a NUL-terminated string; `out` is valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn ar_algebra_from_json(json: *const c_char, out: *mut *mut ArAlgebra) -> ArStatus {
    guard(|| {
        let text = read_str(json)?;
        if out.is_null() {
            return Err(Failure(ArStatus::NullPointer, "null output pointer".into()));
        }
        let sc = StructureConstants::from_json_str(text).map_err(|e| Failure(ArStatus::Parse, e.to_string()))?;
        *out = Box::into_raw(Box::new(ArAlgebra(sc)));
        Ok(())
    })
}

/// Releases an algebra handle. Null is ignored.
///
/// # Safety
/// `algebra` is null or a live handle from [`ar_algebra_from_json`].
#[no_mangle]
pub unsafe extern "C" fn ar_algebra_free(algebra: *mut ArAlgebra) {
    if !algebra.is_null() {
        drop(Box::from_raw(algebra));
    }
}

/// Decides whether the algebra is Frobenius and cross-checks the answer
/// against the rank of its structure-matrix module. Writes the consistency
/// report as JSON.
///
/// # Safety
/// `algebra` is a live handle; `out_json` is valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn ar_frobenius(
    algebra: *const ArAlgebra,
    seed: u64,
    trials: usize,
    out_json: *mut *mut c_char,
) -> ArStatus {
    guard(|| {
        let sc = &deref(algebra)?.0;
        let report = frobenius_iff_generic_rank(sc, &options(seed, trials))
            .map_err(|e| Failure(ArStatus::InvalidData, e.to_string()))?;
        write_json(out_json, &report)
    })
}
