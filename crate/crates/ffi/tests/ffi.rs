use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use liemod_ffi::*;

fn last_error() -> String {
    let e = liemod_last_error();
    assert!(!e.is_null());
    unsafe { CStr::from_ptr(e) }.to_string_lossy().into_owned()
}

fn take_string(s: *mut std::ffi::c_char) -> String {
    let text = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { liemod_string_free(s) };
    text
}

#[test]
fn representation_round_trip() {
    let gens = CString::new("(1,2)(3,4);(1,3)(2,4)").unwrap();
    let mut rep = ptr::null_mut();
    let st = unsafe { liemod_representation_new(4, 2, gens.as_ptr(), false, &mut rep) };
    assert_eq!(st, LiemodStatus::Ok);
    assert!(liemod_last_error().is_null());
    unsafe {
        assert_eq!(liemod_representation_dim(rep), 6);
        assert_eq!(liemod_representation_count(rep), 2);
        let mut buf = vec![0u16; 36];
        assert_eq!(
            liemod_representation_copy_matrix(rep, 1, buf.as_mut_ptr(), 36),
            LiemodStatus::Ok
        );
        assert!(buf.iter().all(|&x| x < 2));
        assert_eq!(
            liemod_representation_copy_matrix(rep, 2, buf.as_mut_ptr(), 36),
            LiemodStatus::InvalidInput
        );
        assert_eq!(
            liemod_representation_copy_matrix(rep, 0, buf.as_mut_ptr(), 35),
            LiemodStatus::InvalidInput
        );

        let mode = CString::new("full").unwrap();
        let mut out = ptr::null_mut();
        assert_eq!(liemod_variety_json(rep, mode.as_ptr(), 0, &mut out), LiemodStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
        assert_eq!(v["dimension"]["value"], 2);
        assert_eq!(v["dimension"]["certified"], true);

        let bad = CString::new("sideways").unwrap();
        assert_eq!(
            liemod_variety_json(rep, bad.as_ptr(), 0, &mut out),
            LiemodStatus::InvalidInput
        );
        assert!(last_error().contains("sideways"));
        liemod_representation_free(rep);
    }
}

#[test]
fn complexity_json_and_errors() {
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { liemod_complexity_json(6, 3, false, &mut out) },
        LiemodStatus::Ok
    );
    let v: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
    assert_eq!((v["schema"].as_u64(), v["value"].as_u64()), (Some(1), Some(1)));

    assert_eq!(
        unsafe { liemod_complexity_json(9, 3, false, &mut out) },
        LiemodStatus::Resource
    );
    assert!(last_error().contains("--force"));
    assert_eq!(
        unsafe { liemod_complexity_json(4, 6, false, &mut out) },
        LiemodStatus::InvalidInput
    );
    assert_eq!(
        unsafe { liemod_complexity_json(4, 2, false, ptr::null_mut()) },
        LiemodStatus::NullPointer
    );
}

#[test]
fn rejects_bad_generators() {
    let mut rep = ptr::null_mut();
    let gens = CString::new("(1,5)").unwrap();
    assert_eq!(
        unsafe { liemod_representation_new(4, 2, gens.as_ptr(), false, &mut rep) },
        LiemodStatus::InvalidInput
    );
    assert!(rep.is_null());
    assert_eq!(
        unsafe { liemod_representation_new(4, 2, ptr::null(), false, &mut rep) },
        LiemodStatus::NullPointer
    );
    unsafe { liemod_representation_free(ptr::null_mut()) };
    unsafe { liemod_string_free(ptr::null_mut()) };
    assert_eq!(unsafe { liemod_representation_dim(ptr::null()) }, 0);
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(liemod_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_export_and_compiles() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/liemod.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for f in [
        "liemod_last_error",
        "liemod_version",
        "liemod_string_free",
        "liemod_representation_new",
        "liemod_representation_free",
        "liemod_representation_dim",
        "liemod_representation_count",
        "liemod_representation_copy_matrix",
        "liemod_variety_json",
        "liemod_complexity_json",
        "LIEMOD_STATUS_RESOURCE = 2",
        "typedef struct LiemodRepresentation LiemodRepresentation",
    ] {
        assert!(text.contains(f), "header lacks {f}");
    }
    // Syntax check only when a C compiler is around.
    if let Ok(status) = Command::new("cc").args(["-fsyntax-only", "-xc"]).arg(&header).status() {
        assert!(status.success(), "cc rejected {}", header.display());
    }
}
