//! C ABI over `ccdp-core`: opaque corpus handles, integer status codes and
//! JSON strings for structured results. The matching declarations live in
//! `include/ccdp.h`.
//!
//! Conventions:
//! - Every fallible function returns a [`CcdpStatus`]; outputs go through
//!   out-pointers that are only written on `CCDP_OK`.
//! - Strings returned through out-pointers are NUL-terminated, UTF-8, owned
//!   by the caller and must be released with [`ccdp_string_free`].
//! - On failure, [`ccdp_last_error`] returns a thread-local message that
//!   stays valid until the next failing call on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use ccdp_core::corpus::{load_corpus_json, parse_corpus_json, Corpus};
use ccdp_core::pipeline::{explain_pair, run_pipeline, SemanticEngine};
use ccdp_core::proximity::ProximityConfig;
use ccdp_core::CcdpError;

/// Status codes shared with the C header. Values are part of the ABI; the
/// variant names render as `CCDP_OK`, `CCDP_PARSE`, ... in C.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CcdpStatus {
    CcdpOk = 0,
    /// A required pointer was NULL or an argument was out of range.
    CcdpInvalidArgument = 1,
    /// The input could not be parsed or validated.
    CcdpParse = 2,
    /// A message id was not present in the corpus.
    CcdpUnknownMessage = 3,
    /// Unexpected internal failure (including caught panics).
    CcdpInternal = 4,
}

/// Opaque handle over an immutable [`Corpus`].
pub struct CcdpCorpus {
    corpus: Corpus,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(message: &str) {
    let sanitized: String = message.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap();
    });
}

fn fail(status: CcdpStatus, message: &str) -> CcdpStatus {
    set_error(message);
    status
}

fn status_for(err: &CcdpError) -> CcdpStatus {
    match err {
        CcdpError::UnknownMessage(_) => CcdpStatus::CcdpUnknownMessage,
        CcdpError::Io(_) | CcdpError::InvalidConfig(_) => CcdpStatus::CcdpInvalidArgument,
        _ => CcdpStatus::CcdpParse,
    }
}

fn guarded(body: impl FnOnce() -> CcdpStatus) -> CcdpStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => fail(CcdpStatus::CcdpInternal, "internal panic"),
    }
}

/// # Safety
/// `ptr` must be a valid NUL-terminated string or NULL.
unsafe fn read_str<'a>(ptr: *const c_char) -> Option<&'a str> {
    if ptr.is_null() {
        return None;
    }
    CStr::from_ptr(ptr).to_str().ok()
}

fn return_string(out: *mut *mut c_char, value: String) -> CcdpStatus {
    match CString::new(value) {
        Ok(s) => {
            unsafe { *out = s.into_raw() };
            CcdpStatus::CcdpOk
        }
        Err(_) => fail(CcdpStatus::CcdpInternal, "result contained a NUL byte"),
    }
}

/// Library version as a static string; never freed by the caller.
#[no_mangle]
pub extern "C" fn ccdp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message of the last failure on this thread ("" if none). Borrowed;
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ccdp_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Load a corpus from a JSON file. On success writes a handle that must be
/// released with `ccdp_corpus_free`.
///
/// # Safety
/// `path` must be a valid NUL-terminated string; `out` must be a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn ccdp_corpus_load_json(
    path: *const c_char,
    out: *mut *mut CcdpCorpus,
) -> CcdpStatus {
    guarded(|| {
        let Some(path) = read_str(path) else {
            return fail(CcdpStatus::CcdpInvalidArgument, "path is NULL or not UTF-8");
        };
        if out.is_null() {
            return fail(CcdpStatus::CcdpInvalidArgument, "out pointer is NULL");
        }
        match load_corpus_json(Path::new(path)) {
            Ok((corpus, _warnings)) => {
                *out = Box::into_raw(Box::new(CcdpCorpus { corpus }));
                CcdpStatus::CcdpOk
            }
            Err(e) => fail(status_for(&e), &e.to_string()),
        }
    })
}

/// Parse a corpus from an in-memory JSON document.
///
/// # Safety
/// `json` must be a valid NUL-terminated string; `out` must be a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn ccdp_corpus_from_json(
    json: *const c_char,
    out: *mut *mut CcdpCorpus,
) -> CcdpStatus {
    guarded(|| {
        let Some(json) = read_str(json) else {
            return fail(CcdpStatus::CcdpInvalidArgument, "json is NULL or not UTF-8");
        };
        if out.is_null() {
            return fail(CcdpStatus::CcdpInvalidArgument, "out pointer is NULL");
        }
        match parse_corpus_json(json) {
            Ok((corpus, _warnings)) => {
                *out = Box::into_raw(Box::new(CcdpCorpus { corpus }));
                CcdpStatus::CcdpOk
            }
            Err(e) => fail(status_for(&e), &e.to_string()),
        }
    })
}

/// Number of messages in the corpus; 0 when `corpus` is NULL.
///
/// # Safety
/// `corpus` must be NULL or a handle from a `ccdp_corpus_*` constructor.
#[no_mangle]
pub unsafe extern "C" fn ccdp_corpus_len(corpus: *const CcdpCorpus) -> usize {
    if corpus.is_null() {
        return 0;
    }
    (*corpus).corpus.len()
}

/// Release a corpus handle. NULL is a no-op.
///
/// # Safety
/// `corpus` must be NULL or an unreleased handle from a constructor.
#[no_mangle]
pub unsafe extern "C" fn ccdp_corpus_free(corpus: *mut CcdpCorpus) {
    if !corpus.is_null() {
        drop(Box::from_raw(corpus));
    }
}

/// Release a string previously returned through an out-pointer. NULL is a
/// no-op.
///
/// # Safety
/// `s` must be NULL or a string obtained from this library.
#[no_mangle]
pub unsafe extern "C" fn ccdp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

fn config_with_threshold(threshold: f64) -> Result<ProximityConfig, CcdpStatus> {
    let cfg = ProximityConfig {
        threshold,
        ..ProximityConfig::default()
    };
    match cfg.validate() {
        Ok(()) => Ok(cfg),
        Err(e) => {
            set_error(&e.to_string());
            Err(CcdpStatus::CcdpInvalidArgument)
        }
    }
}

/// Header-based threads as a JSON array of `{ect_id, message_ids}`.
///
/// # Safety
/// `corpus` must be a live handle; `out_json` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ccdp_threads_json(
    corpus: *const CcdpCorpus,
    out_json: *mut *mut c_char,
) -> CcdpStatus {
    guarded(|| {
        if corpus.is_null() || out_json.is_null() {
            return fail(CcdpStatus::CcdpInvalidArgument, "corpus or out pointer is NULL");
        }
        let ects = ccdp_core::ect::build_ects(&(*corpus).corpus);
        match serde_json::to_string(&ects) {
            Ok(json) => return_string(out_json, json),
            Err(e) => fail(CcdpStatus::CcdpInternal, &e.to_string()),
        }
    })
}

/// Run threading + linking with the default configuration at `threshold`
/// and return the collaborative conversations as a JSON array of
/// `{ccdp_id, ect_ids, links}`.
///
/// # Safety
/// `corpus` must be a live handle; `out_json` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ccdp_pipeline_json(
    corpus: *const CcdpCorpus,
    threshold: f64,
    out_json: *mut *mut c_char,
) -> CcdpStatus {
    guarded(|| {
        if corpus.is_null() || out_json.is_null() {
            return fail(CcdpStatus::CcdpInvalidArgument, "corpus or out pointer is NULL");
        }
        let cfg = match config_with_threshold(threshold) {
            Ok(cfg) => cfg,
            Err(status) => return status,
        };
        let mut engine = SemanticEngine::exact_cosine();
        match run_pipeline(&(*corpus).corpus, &cfg, &mut engine, None) {
            Ok(out) => match serde_json::to_string(&out.ccdps) {
                Ok(json) => return_string(out_json, json),
                Err(e) => fail(CcdpStatus::CcdpInternal, &e.to_string()),
            },
            Err(e) => fail(status_for(&e), &e.to_string()),
        }
    })
}

/// Global proximity of two messages under the default configuration.
///
/// # Safety
/// `corpus` must be a live handle; `msg_a`/`msg_b` must be valid
/// NUL-terminated strings; `out_gp` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ccdp_global_proximity(
    corpus: *const CcdpCorpus,
    msg_a: *const c_char,
    msg_b: *const c_char,
    out_gp: *mut f64,
) -> CcdpStatus {
    guarded(|| {
        if corpus.is_null() || out_gp.is_null() {
            return fail(CcdpStatus::CcdpInvalidArgument, "corpus or out pointer is NULL");
        }
        let (Some(id_a), Some(id_b)) = (read_str(msg_a), read_str(msg_b)) else {
            return fail(CcdpStatus::CcdpInvalidArgument, "message id is NULL or not UTF-8");
        };
        let cfg = ProximityConfig::default();
        let engine = SemanticEngine::exact_cosine();
        match explain_pair(&(*corpus).corpus, id_a, id_b, &cfg, &engine.context()) {
            Ok(breakdown) => {
                *out_gp = breakdown.gp;
                CcdpStatus::CcdpOk
            }
            Err(e) => fail(status_for(&e), &e.to_string()),
        }
    })
}
