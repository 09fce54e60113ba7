//! Calls the exported C functions from Rust exactly as a C client would.

use std::ffi::{c_char, CStr, CString};
use std::ptr;

use affinor_rank_ffi::*;
use serde_json::Value;

fn examples(name: &str) -> CString {
    let p = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/examples").join(name);
    CString::new(std::fs::read_to_string(p).unwrap()).unwrap()
}

unsafe fn take_json(s: *mut c_char) -> Value {
    assert!(!s.is_null());
    let v = serde_json::from_str(CStr::from_ptr(s).to_str().unwrap()).unwrap();
    ar_string_free(s);
    v
}

unsafe fn last_error() -> String {
    CStr::from_ptr(ar_last_error_message()).to_str().unwrap().to_owned()
}

#[test]
fn generic_rank_of_quaternions_on_r8() {
    unsafe {
        let mut basis = ptr::null_mut();
        assert_eq!(ar_basis_from_json(examples("quaternion_r8.json").as_ptr(), &mut basis), ArStatus::Ok);
        assert!(ar_last_error_message().is_null());
        let (mut m, mut n) = (0, 0);
        assert_eq!(ar_basis_dims(basis, &mut m, &mut n), ArStatus::Ok);
        assert_eq!((m, n), (8, 4));

        let mut out = ptr::null_mut();
        assert_eq!(ar_generic_rank(basis, 7, 0, &mut out), ArStatus::Ok);
        let generic = take_json(out);
        assert_eq!(generic["status"], "certified");

        assert_eq!(ar_weak_rank(basis, 7, 0, &mut out), ArStatus::Ok);
        let weak = take_json(out);
        assert_eq!(weak["status"], "witness");

        // The emitted certificate audits clean; raising the claim breaks it.
        let mut cert = weak["certificate"].clone();
        let text = CString::new(cert.to_string()).unwrap();
        let mut valid = -1;
        assert_eq!(ar_verify_certificate(text.as_ptr(), &mut valid, ptr::null_mut()), ArStatus::Ok);
        assert_eq!(valid, 1);
        cert["claimed_rank"] = 5.into();
        let text = CString::new(cert.to_string()).unwrap();
        assert_eq!(ar_verify_certificate(text.as_ptr(), &mut valid, &mut out), ArStatus::Ok);
        assert_eq!(valid, 0);
        assert_eq!(take_json(out)["valid"], false);

        ar_basis_free(basis);
    }
}

#[test]
fn frobenius_verdicts() {
    unsafe {
        for (file, expected) in [("local3.json", false), ("quaternions.json", true)] {
            let mut alg = ptr::null_mut();
            assert_eq!(ar_algebra_from_json(examples(file).as_ptr(), &mut alg), ArStatus::Ok);
            let mut out = ptr::null_mut();
            assert_eq!(ar_frobenius(alg, 1, 0, &mut out), ArStatus::Ok);
            let r = take_json(out);
            assert_eq!(r["frobenius_decided"], expected, "{file}");
            assert_eq!(r["module_decided"], expected, "{file}");
            ar_algebra_free(alg);
        }
    }
}

#[test]
fn errors_set_status_and_message() {
    unsafe {
        let mut basis = ptr::null_mut();
        assert_eq!(ar_basis_from_json(ptr::null(), &mut basis), ArStatus::NullPointer);
        assert!(!last_error().is_empty());

        let bad = CString::new("{\"m\": 2}").unwrap();
        assert_eq!(ar_basis_from_json(bad.as_ptr(), &mut basis), ArStatus::Parse);
        assert!(basis.is_null());
        assert!(!last_error().is_empty());

        let invalid = [0xffu8, 0];
        assert_eq!(ar_basis_from_json(invalid.as_ptr().cast(), &mut basis), ArStatus::InvalidUtf8);

        let mut out = ptr::null_mut();
        assert_eq!(ar_weak_rank(ptr::null(), 0, 0, &mut out), ArStatus::NullPointer);
        assert!(out.is_null());

        ar_basis_free(ptr::null_mut());
        ar_algebra_free(ptr::null_mut());
        ar_string_free(ptr::null_mut());
        assert_eq!(CStr::from_ptr(ar_version()).to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/affinor_rank.h")).unwrap();
    for f in [
        "ar_basis_from_json",
        "ar_basis_free",
        "ar_basis_dims",
        "ar_weak_rank",
        "ar_generic_rank",
        "ar_verify_certificate",
        "ar_algebra_from_json",
        "ar_algebra_free",
        "ar_frobenius",
        "ar_last_error_message",
        "ar_string_free",
        "ar_version",
    ] {
        assert!(header.contains(&format!("{f}(")), "{f} missing from header");
    }
    assert!(header.contains("typedef struct ArBasis ArBasis"));
    assert!(header.contains("AR_STATUS_OK = 0"));
}
