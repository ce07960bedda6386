//! C ABI for the caponef toolkit.
//!
//! Every function returns a [`CpfStatus`]. On failure a description is kept
//! per thread and can be read with [`cpf_last_error_message`]. Complex
//! samples cross the boundary as interleaved `I, Q` doubles. Forests are
//! opaque [`CpfForest`] handles released with [`cpf_forest_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use caponef::classify::model_io::parse_forest;
use caponef::classify::{Classifier, RandomForestModel};
use caponef::features::{extract_features, FeatureError, TrendlessSequence, FEATURE_COUNT};
use caponef::signal::{error_phase, gen_transnoise, EtalonSignal, IQFrame, SignalError};
use caponef::stats::{p_value_two_sided, StatsError};
use num_complex::Complex64;

/// Number of values written by [`cpf_extract_features`].
pub const CPF_FEATURE_COUNT: usize = 10;
const _: () = assert!(CPF_FEATURE_COUNT == FEATURE_COUNT);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CpfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// The input is valid but the quantity is undefined for it.
    Degenerate = 3,
    ParseError = 4,
    IoError = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

/// Trained random forest.
pub struct CpfForest {
    model: RandomForestModel,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: CpfStatus, msg: impl Into<String>) -> CpfStatus {
    set_error(msg);
    status
}

/// Runs `f`, converting a panic into `CpfStatus::Panic`.
fn guard(f: impl FnOnce() -> CpfStatus) -> CpfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(CpfStatus::Panic, "internal panic"),
    }
}

fn feature_status(e: &FeatureError) -> CpfStatus {
    match e {
        FeatureError::NonFiniteInput { .. } | FeatureError::TooShort { .. } => CpfStatus::InvalidArgument,
        _ => CpfStatus::Degenerate,
    }
}

fn signal_status(e: &SignalError) -> CpfStatus {
    match e {
        SignalError::ZeroGain { .. } => CpfStatus::Degenerate,
        _ => CpfStatus::InvalidArgument,
    }
}

unsafe fn complex_slice<'a>(iq: *const f64, n: usize) -> &'a [f64] {
    slice::from_raw_parts(iq, 2 * n)
}

fn to_complex(iq: &[f64]) -> Vec<Complex64> {
    iq.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect()
}

/// Message describing the last failure on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cpf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Computes P1..P10 of a real sequence into `out[0..10]`.
///
/// # Safety
/// `samples` must point to `n` readable doubles and `out` to
/// `CPF_FEATURE_COUNT` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn cpf_extract_features(samples: *const f64, n: usize, out: *mut f64) -> CpfStatus {
    guard(|| {
        if samples.is_null() || out.is_null() {
            return fail(CpfStatus::NullPointer, "null pointer argument");
        }
        let values = slice::from_raw_parts(samples, n).to_vec();
        let result = TrendlessSequence::new(values).and_then(|s| extract_features(&s));
        match result {
            Ok(f) => {
                slice::from_raw_parts_mut(out, FEATURE_COUNT).copy_from_slice(f.as_array());
                CpfStatus::Ok
            }
            Err(e) => fail(feature_status(&e), e.to_string()),
        }
    })
}

/// Writes `len` real trans-noise levels for frame `frame_index`.
///
/// # Safety
/// `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn cpf_transnoise(frame_index: usize, len: usize, out: *mut f64) -> CpfStatus {
    guard(|| {
        if out.is_null() {
            return fail(CpfStatus::NullPointer, "null output buffer");
        }
        match gen_transnoise(frame_index, len) {
            Ok(v) => {
                slice::from_raw_parts_mut(out, len).copy_from_slice(&v);
                CpfStatus::Ok
            }
            Err(e) => fail(CpfStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Error-phase sequence of one synchronised frame against the etalon.
/// `frame` and `etalon` hold `len` interleaved complex samples each;
/// `out` receives `len` phases in (-pi, pi].
///
/// # Safety
/// `frame` and `etalon` must point to `2 * len` readable doubles and `out`
/// to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn cpf_error_phase(
    frame: *const f64,
    etalon: *const f64,
    len: usize,
    out: *mut f64,
) -> CpfStatus {
    guard(|| {
        if frame.is_null() || etalon.is_null() || out.is_null() {
            return fail(CpfStatus::NullPointer, "null pointer argument");
        }
        let etalon = match EtalonSignal::new(to_complex(complex_slice(etalon, len))) {
            Ok(e) => e,
            Err(e) => return fail(signal_status(&e), e.to_string()),
        };
        let frame = IQFrame::new(to_complex(complex_slice(frame, len)));
        match error_phase(&frame, &etalon) {
            Ok(p) => {
                slice::from_raw_parts_mut(out, len).copy_from_slice(p.phases());
                CpfStatus::Ok
            }
            Err(e) => fail(signal_status(&e), e.to_string()),
        }
    })
}

/// Two-sided p-value of a correlation `r` over `n` samples. |r| = 1 gives
/// `Degenerate` with `*out = 0`.
///
/// # Safety
/// `out` must point to one writable double.
#[no_mangle]
pub unsafe extern "C" fn cpf_pvalue_two_sided(r: f64, n: usize, out: *mut f64) -> CpfStatus {
    guard(|| {
        if out.is_null() {
            return fail(CpfStatus::NullPointer, "null output pointer");
        }
        if !r.is_finite() || r.abs() > 1.0 {
            return fail(CpfStatus::InvalidArgument, "r must lie in [-1, 1]");
        }
        match p_value_two_sided(r, n) {
            Ok(p) => {
                *out = p;
                CpfStatus::Ok
            }
            Err(StatsError::DegenerateCorrelation) => {
                *out = 0.0;
                fail(CpfStatus::Degenerate, StatsError::DegenerateCorrelation.to_string())
            }
            Err(e) => fail(CpfStatus::InvalidArgument, e.to_string()),
        }
    })
}

unsafe fn forest_from_text(text: &str, out: *mut *mut CpfForest) -> CpfStatus {
    match parse_forest(text) {
        Ok(model) => {
            *out = Box::into_raw(Box::new(CpfForest { model }));
            CpfStatus::Ok
        }
        Err(e) => fail(CpfStatus::ParseError, e.to_string()),
    }
}

/// Parses a model in the text format written by `caponef train-eval`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn cpf_forest_from_string(text: *const c_char, out: *mut *mut CpfForest) -> CpfStatus {
    guard(|| {
        if text.is_null() || out.is_null() {
            return fail(CpfStatus::NullPointer, "null pointer argument");
        }
        *out = ptr::null_mut();
        match CStr::from_ptr(text).to_str() {
            Ok(s) => forest_from_text(s, out),
            Err(_) => fail(CpfStatus::ParseError, "model text is not UTF-8"),
        }
    })
}

/// Loads a model file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn cpf_forest_load(path: *const c_char, out: *mut *mut CpfForest) -> CpfStatus {
    guard(|| {
        if path.is_null() || out.is_null() {
            return fail(CpfStatus::NullPointer, "null pointer argument");
        }
        *out = ptr::null_mut();
        let Ok(path) = CStr::from_ptr(path).to_str() else {
            return fail(CpfStatus::InvalidArgument, "path is not UTF-8");
        };
        match std::fs::read_to_string(path) {
            Ok(text) => forest_from_text(&text, out),
            Err(e) => fail(CpfStatus::IoError, format!("{path}: {e}")),
        }
    })
}

/// Releases a forest. NULL is ignored.
///
/// # Safety
/// `forest` must come from `cpf_forest_load` or `cpf_forest_from_string`
/// and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cpf_forest_free(forest: *mut CpfForest) {
    if !forest.is_null() {
        drop(Box::from_raw(forest));
    }
}

/// # Safety
/// `forest` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cpf_forest_n_features(forest: *const CpfForest, out: *mut usize) -> CpfStatus {
    guard(|| match (forest.as_ref(), out.is_null()) {
        (Some(f), false) => {
            *out = f.model.n_features();
            CpfStatus::Ok
        }
        _ => fail(CpfStatus::NullPointer, "null pointer argument"),
    })
}

/// # Safety
/// `forest` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cpf_forest_n_classes(forest: *const CpfForest, out: *mut usize) -> CpfStatus {
    guard(|| match (forest.as_ref(), out.is_null()) {
        (Some(f), false) => {
            *out = f.model.classes.len();
            CpfStatus::Ok
        }
        _ => fail(CpfStatus::NullPointer, "null pointer argument"),
    })
}

/// Class labels in ascending order; `predict_proba` follows this order.
///
/// # Safety
/// `forest` must be a live handle and `out` must hold `capacity` writable
/// values.
#[no_mangle]
pub unsafe extern "C" fn cpf_forest_classes(forest: *const CpfForest, out: *mut u32, capacity: usize) -> CpfStatus {
    guard(|| {
        let (Some(f), false) = (forest.as_ref(), out.is_null()) else {
            return fail(CpfStatus::NullPointer, "null pointer argument");
        };
        write_buffer(&f.model.classes, out, capacity)
    })
}

unsafe fn write_buffer<T: Copy>(values: &[T], out: *mut T, capacity: usize) -> CpfStatus {
    if capacity < values.len() {
        return fail(
            CpfStatus::BufferTooSmall,
            format!("buffer holds {capacity}, need {}", values.len()),
        );
    }
    slice::from_raw_parts_mut(out, values.len()).copy_from_slice(values);
    CpfStatus::Ok
}

unsafe fn checked_row<'a>(f: &CpfForest, x: *const f64, n: usize) -> Result<&'a [f64], CpfStatus> {
    if x.is_null() {
        return Err(fail(CpfStatus::NullPointer, "null feature row"));
    }
    if n != f.model.n_features() {
        return Err(fail(
            CpfStatus::InvalidArgument,
            format!("row has {n} features, model expects {}", f.model.n_features()),
        ));
    }
    let row = slice::from_raw_parts(x, n);
    if row.iter().any(|v| !v.is_finite()) {
        return Err(fail(CpfStatus::InvalidArgument, "non-finite feature value"));
    }
    Ok(row)
}

/// Predicted label for one feature row.
///
/// # Safety
/// `forest` must be a live handle, `x` must point to `n` readable doubles
/// and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cpf_forest_predict(forest: *const CpfForest, x: *const f64, n: usize, out: *mut u32) -> CpfStatus {
    guard(|| {
        let (Some(f), false) = (forest.as_ref(), out.is_null()) else {
            return fail(CpfStatus::NullPointer, "null pointer argument");
        };
        match checked_row(f, x, n) {
            Ok(row) => {
                *out = f.model.predict(row);
                CpfStatus::Ok
            }
            Err(s) => s,
        }
    })
}

/// Class probabilities for one feature row, in `cpf_forest_classes` order.
///
/// # Safety
/// `forest` must be a live handle, `x` must point to `n` readable doubles
/// and `out` must hold `capacity` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn cpf_forest_predict_proba(
    forest: *const CpfForest,
    x: *const f64,
    n: usize,
    out: *mut f64,
    capacity: usize,
) -> CpfStatus {
    guard(|| {
        let (Some(f), false) = (forest.as_ref(), out.is_null()) else {
            return fail(CpfStatus::NullPointer, "null pointer argument");
        };
        match checked_row(f, x, n) {
            Ok(row) => write_buffer(&f.model.predict_proba(row), out, capacity),
            Err(s) => s,
        }
    })
}

/// Normalised impurity importances, one per model feature.
///
/// # Safety
/// `forest` must be a live handle and `out` must hold `capacity` writable
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn cpf_forest_importances(forest: *const CpfForest, out: *mut f64, capacity: usize) -> CpfStatus {
    guard(|| {
        let (Some(f), false) = (forest.as_ref(), out.is_null()) else {
            return fail(CpfStatus::NullPointer, "null pointer argument");
        };
        write_buffer(&f.model.importances, out, capacity)
    })
}
