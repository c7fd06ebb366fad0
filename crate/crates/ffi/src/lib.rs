//! C interface to `liemod`. Every fallible call returns a [`LiemodStatus`];
//! on failure the message is available from [`liemod_last_error`] on the
//! same thread. Strings returned through out-parameters are owned by the
//! caller and must be released with [`liemod_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use liemod::complexity::{assemble, ComplexityOptions};
use liemod::lie::{LieRepresentation, ResourceLimits};
use liemod::perm::Permutation;
use liemod::variety::{analyze, Mode, VarietyConfig};
use liemod::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LiemodStatus {
    Ok = 0,
    Io = 1,
    Resource = 2,
    InvalidInput = 3,
    Internal = 4,
    NullPointer = 5,
    Panic = 6,
}

/// Action matrices of a list of permutations on `Lie(n)` over `GF(p)`.
pub struct LiemodRepresentation {
    inner: LieRepresentation,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn status_of(err: &Error) -> LiemodStatus {
    match err.exit_code() {
        1 => LiemodStatus::Io,
        2 => LiemodStatus::Resource,
        4 => LiemodStatus::Internal,
        _ => LiemodStatus::InvalidInput,
    }
}

enum Failure {
    Lib(Error),
    Null(&'static str),
    Utf8(&'static str),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> LiemodStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            LiemodStatus::Ok
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("{what} is null"));
            LiemodStatus::NullPointer
        }
        Ok(Err(Failure::Utf8(what))) => {
            set_error(format!("{what} is not valid UTF-8"));
            LiemodStatus::InvalidInput
        }
        Err(_) => {
            set_error("panic inside liemod");
            LiemodStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| Failure::Utf8(what))
}

unsafe fn write_string(out: *mut *mut c_char, text: String) -> Result<(), Failure> {
    let c = CString::new(text).map_err(|_| Error::internal("output contains a NUL byte"))?;
    *out = c.into_raw();
    Ok(())
}

fn json_failure(e: serde_json::Error) -> Failure {
    Failure::Lib(Error::internal(format!("serialization: {e}")))
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into the library from this thread.
#[no_mangle]
pub extern "C" fn liemod_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn liemod_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn liemod_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds the action matrices of the generators on `Lie(n)` over `GF(p)`.
/// `generators` holds cycle notation separated by `;`, e.g.
/// `"(1,2)(3,4);(1,3)(2,4)"`. `force` lifts the default size cap.
///
/// # Safety
/// `generators` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn liemod_representation_new(
    n: usize,
    p: u32,
    generators: *const c_char,
    force: bool,
    out: *mut *mut LiemodRepresentation,
) -> LiemodStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let text = read_str(generators, "generators")?;
        let gens = text
            .split(';')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| Permutation::parse_cycles(s, n))
            .collect::<liemod::Result<Vec<_>>>()?;
        let inner = LieRepresentation::build(n, p, &gens, ResourceLimits { force })?;
        *out = Box::into_raw(Box::new(LiemodRepresentation { inner }));
        Ok(())
    })
}

/// # Safety
/// `rep` must be null or a handle from [`liemod_representation_new`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn liemod_representation_free(rep: *mut LiemodRepresentation) {
    if !rep.is_null() {
        drop(Box::from_raw(rep));
    }
}

/// `(n-1)!`, or 0 for a null handle.
///
/// # Safety
/// `rep` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn liemod_representation_dim(rep: *const LiemodRepresentation) -> usize {
    rep.as_ref().map_or(0, |r| r.inner.dim())
}

/// Number of generator matrices, or 0 for a null handle.
///
/// # Safety
/// `rep` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn liemod_representation_count(rep: *const LiemodRepresentation) -> usize {
    rep.as_ref().map_or(0, |r| r.inner.matrices().len())
}

/// Copies matrix `index` row-major into `buf`, which must hold `dim * dim`
/// entries.
///
/// # Safety
/// `rep` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn liemod_representation_copy_matrix(
    rep: *const LiemodRepresentation,
    index: usize,
    buf: *mut u16,
    len: usize,
) -> LiemodStatus {
    guard(|| {
        let rep = rep.as_ref().ok_or(Failure::Null("rep"))?;
        if buf.is_null() {
            return Err(Failure::Null("buf"));
        }
        let m = rep
            .inner
            .matrices()
            .get(index)
            .ok_or_else(|| Error::invalid(format!("matrix index {index} out of range")))?;
        let data = m.data();
        if len != data.len() {
            return Err(Error::invalid(format!("buffer holds {len} entries, matrix has {}", data.len())).into());
        }
        ptr::copy_nonoverlapping(data.as_ptr(), buf, len);
        Ok(())
    })
}

/// Rank-variety analysis of the handle's matrices as JSON. `mode` is one of
/// `scan`, `sigma`, `generic`, `full`; `ext` is the largest extension degree
/// scanned (0 for the default).
///
/// # Safety
/// `rep` must be a live handle, `mode` a valid C string, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn liemod_variety_json(
    rep: *const LiemodRepresentation,
    mode: *const c_char,
    ext: u32,
    out: *mut *mut c_char,
) -> LiemodStatus {
    guard(|| {
        let rep = rep.as_ref().ok_or(Failure::Null("rep"))?;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let mode: Mode = read_str(mode, "mode")?.parse()?;
        if mode == Mode::Point {
            return Err(Error::invalid("point mode is not available through this call").into());
        }
        let mut cfg = VarietyConfig {
            mode,
            ..VarietyConfig::default()
        };
        if ext != 0 {
            cfg.e_max = ext;
        }
        let analysis = analyze(rep.inner.matrices(), &cfg)?;
        write_string(out, serde_json::to_string(&analysis).map_err(json_failure)?)
    })
}

/// Complexity certificate of `Lie(n)` over `GF(p)` as JSON.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn liemod_complexity_json(n: usize, p: u32, force: bool, out: *mut *mut c_char) -> LiemodStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let opts = ComplexityOptions {
            limits: ResourceLimits { force },
            ..ComplexityOptions::default()
        };
        let cert = assemble(n, p, &opts)?;
        write_string(out, serde_json::to_string(&cert).map_err(json_failure)?)
    })
}
