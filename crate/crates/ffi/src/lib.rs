//! `fbnet-ffi` — C ABI bindings for the fbnet decision engine.
//!
//! Conventions:
//! - Opaque handles are heap-allocated boxes behind raw pointers with
//!   explicit `_free` functions.
//! - Functions return `FBN_OK` (0) or a negative error code; lookups that
//!   produce a value return it as a non-negative integer.
//! - The last error message is stored per thread and retrieved via
//!   [`fbn_last_error`].
//!
//! # Safety (blanket)
//!
//! All `unsafe extern "C"` functions share the same contract: pointer
//! arguments must be non-null (unless documented otherwise), aligned, and
//! valid for the duration of the call; handles must originate from this
//! library and must not be used after being freed; buffer capacities must
//! describe writable memory of at least the stated size.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::Path;

use fbnet::model::Engine;

/// Success.
pub const FBN_OK: i32 = 0;
/// A required pointer argument was null.
pub const FBN_ERR_NULL: i32 = -1;
/// A string argument was not valid UTF-8.
pub const FBN_ERR_UTF8: i32 = -2;
/// The bundle could not be read or parsed.
pub const FBN_ERR_BUNDLE: i32 = -3;
/// An input value or length did not match the model.
pub const FBN_ERR_INPUT: i32 = -4;
/// The provided buffer is too small.
pub const FBN_ERR_BUFFER: i32 = -5;
/// An index argument is out of range.
pub const FBN_ERR_RANGE: i32 = -6;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<Vec<u8>>) {
    let cstr = CString::new(msg).unwrap_or_else(|_| CString::new("invalid error").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(cstr));
}

fn clear_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

/// Opaque engine handle; create with [`fbn_engine_open`], destroy with
/// [`fbn_engine_free`].
pub struct FbnEngine {
    inner: Engine,
}

/// Copies the current thread's last error message (NUL-terminated) into
/// `buf` and returns its length in bytes (excluding the NUL), 0 when no
/// error is stored, or `FBN_ERR_BUFFER`/`FBN_ERR_NULL`.
///
/// # Safety
/// `buf` must point to `cap` writable bytes when `cap > 0`.
#[no_mangle]
pub unsafe extern "C" fn fbn_last_error(buf: *mut c_char, cap: usize) -> i32 {
    LAST_ERROR.with(|slot| {
        let slot = slot.borrow();
        let Some(msg) = slot.as_ref() else {
            return 0;
        };
        let bytes = msg.as_bytes_with_nul();
        if buf.is_null() {
            return FBN_ERR_NULL;
        }
        if cap < bytes.len() {
            return FBN_ERR_BUFFER;
        }
        std::ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, bytes.len());
        (bytes.len() - 1) as i32
    })
}

/// Library version as a static NUL-terminated string; never freed.
#[no_mangle]
pub extern "C" fn fbn_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Loads a model bundle directory. Returns null on failure; call
/// [`fbn_last_error`] for the reason.
///
/// # Safety
/// `bundle_dir` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn fbn_engine_open(bundle_dir: *const c_char) -> *mut FbnEngine {
    clear_error();
    if bundle_dir.is_null() {
        set_error("bundle_dir is null");
        return std::ptr::null_mut();
    }
    let path = match CStr::from_ptr(bundle_dir).to_str() {
        Ok(s) => s,
        Err(_) => {
            set_error("bundle_dir is not valid UTF-8");
            return std::ptr::null_mut();
        }
    };
    match Engine::load(Path::new(path)) {
        Ok((engine, _manifest)) => Box::into_raw(Box::new(FbnEngine { inner: engine })),
        Err(e) => {
            set_error(e.to_string());
            std::ptr::null_mut()
        }
    }
}

/// Frees an engine handle. Null is a no-op.
///
/// # Safety
/// `engine` must have come from [`fbn_engine_open`] and not been freed.
#[no_mangle]
pub unsafe extern "C" fn fbn_engine_free(engine: *mut FbnEngine) {
    if !engine.is_null() {
        drop(Box::from_raw(engine));
    }
}

/// Number of output grades, or a negative error code.
///
/// # Safety
/// `engine` must be a live handle from [`fbn_engine_open`].
#[no_mangle]
pub unsafe extern "C" fn fbn_engine_num_grades(engine: *const FbnEngine) -> i32 {
    let Some(engine) = engine.as_ref() else {
        set_error("engine is null");
        return FBN_ERR_NULL;
    };
    engine.inner.network.output_scale.arity() as i32
}

/// Number of raw input scores one record carries, or a negative error
/// code.
///
/// # Safety
/// `engine` must be a live handle from [`fbn_engine_open`].
#[no_mangle]
pub unsafe extern "C" fn fbn_engine_num_inputs(engine: *const FbnEngine) -> i32 {
    let Some(engine) = engine.as_ref() else {
        set_error("engine is null");
        return FBN_ERR_NULL;
    };
    engine.inner.specs.len() as i32
}

unsafe fn copy_str(out: *mut c_char, cap: usize, s: &str) -> i32 {
    if out.is_null() {
        set_error("output buffer is null");
        return FBN_ERR_NULL;
    }
    let bytes = s.as_bytes();
    if cap < bytes.len() + 1 {
        set_error(format!(
            "buffer of {cap} bytes cannot hold {} + NUL",
            bytes.len()
        ));
        return FBN_ERR_BUFFER;
    }
    std::ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, out, bytes.len());
    *out.add(bytes.len()) = 0;
    bytes.len() as i32
}

/// Copies the label of grade `index` (lowest grade is 0) into `buf`
/// NUL-terminated, returning its length or a negative error code.
///
/// # Safety
/// `engine` must be a live handle; `buf` must point to `cap` writable
/// bytes.
#[no_mangle]
pub unsafe extern "C" fn fbn_engine_grade_label(
    engine: *const FbnEngine,
    index: usize,
    buf: *mut c_char,
    cap: usize,
) -> i32 {
    clear_error();
    let Some(engine) = engine.as_ref() else {
        set_error("engine is null");
        return FBN_ERR_NULL;
    };
    let scale = &engine.inner.network.output_scale;
    if index >= scale.arity() {
        set_error(format!("grade index {index} out of range"));
        return FBN_ERR_RANGE;
    }
    copy_str(buf, cap, scale.label(index))
}

/// Copies the name of input column `index` (the order `fbn_engine_infer`
/// expects) into `buf` NUL-terminated, returning its length or a negative
/// error code.
///
/// # Safety
/// `engine` must be a live handle; `buf` must point to `cap` writable
/// bytes.
#[no_mangle]
pub unsafe extern "C" fn fbn_engine_input_name(
    engine: *const FbnEngine,
    index: usize,
    buf: *mut c_char,
    cap: usize,
) -> i32 {
    clear_error();
    let Some(engine) = engine.as_ref() else {
        set_error("engine is null");
        return FBN_ERR_NULL;
    };
    if index >= engine.inner.specs.len() {
        set_error(format!("input index {index} out of range"));
        return FBN_ERR_RANGE;
    }
    copy_str(buf, cap, engine.inner.specs[index].name())
}

/// Grades one record. `scores` holds `n_scores` raw values in input-column
/// order; the posterior is written to `probs_out` (one probability per
/// grade, lowest first) when it is non-null. Returns the predicted grade
/// index, or a negative error code.
///
/// # Safety
/// `engine` must be a live handle; `scores` must point to `n_scores`
/// readable doubles; `probs_out`, when non-null, must point to
/// `probs_cap` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn fbn_engine_infer(
    engine: *const FbnEngine,
    scores: *const f64,
    n_scores: usize,
    probs_out: *mut f64,
    probs_cap: usize,
) -> i32 {
    clear_error();
    let Some(engine) = engine.as_ref() else {
        set_error("engine is null");
        return FBN_ERR_NULL;
    };
    if scores.is_null() {
        set_error("scores is null");
        return FBN_ERR_NULL;
    }
    let values = std::slice::from_raw_parts(scores, n_scores);
    let (dist, grade) = match engine.inner.predict(values) {
        Ok(result) => result,
        Err(e) => {
            set_error(e.to_string());
            return FBN_ERR_INPUT;
        }
    };
    if !probs_out.is_null() {
        if probs_cap < dist.probs().len() {
            set_error(format!(
                "probs buffer holds {probs_cap} values, need {}",
                dist.probs().len()
            ));
            return FBN_ERR_BUFFER;
        }
        std::ptr::copy_nonoverlapping(dist.probs().as_ptr(), probs_out, dist.probs().len());
    }
    grade as i32
}
