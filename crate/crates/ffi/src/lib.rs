//! C ABI for `framekit`.
//!
//! Frames cross the boundary as opaque `FkFrame` handles. Matrix data is
//! exchanged column-major: entry `(r, j)` (row `r` of vector `j`) lives at
//! `data[j * n + r]`, so each frame vector is contiguous.
//!
//! Every function returns an [`FkStatus`]; on failure a message is available
//! from [`fk_last_error`] on the same thread. Handles returned through `out`
//! parameters must be released with [`fk_frame_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use framekit::scaling::{decide_scalability, oracle_scale, FailureReason};
use framekit::{
    audit, canonicalize, construct, equivalent, random_parseval, verify, FrameError, FrameMatrix,
    SeedVector,
};

/// Opaque frame handle.
pub struct FkFrame {
    inner: FrameMatrix,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FkStatus {
    Ok = 0,
    ZeroColumn = 1,
    InvalidShape = 2,
    NonFinite = 3,
    SingularBasis = 4,
    ShapeMismatch = 5,
    SeedTooLong = 6,
    RowsNotOrthonormal = 7,
    UnsupportedDimension = 8,
    DegeneratePair = 9,
    NotUnitNorm = 10,
    TrivialFrame = 11,
    WrongCount = 12,
    NotParseval = 13,
    WrongDimension = 14,
    NullPointer = 100,
    BufferTooSmall = 101,
    Panic = 102,
}

impl From<&FrameError> for FkStatus {
    fn from(e: &FrameError) -> Self {
        match e {
            FrameError::ZeroColumn(_) => FkStatus::ZeroColumn,
            FrameError::InvalidShape(_) => FkStatus::InvalidShape,
            FrameError::NonFinite { .. } => FkStatus::NonFinite,
            FrameError::SingularBasis { .. } => FkStatus::SingularBasis,
            FrameError::ShapeMismatch(_) => FkStatus::ShapeMismatch,
            FrameError::SeedTooLong { .. } => FkStatus::SeedTooLong,
            FrameError::RowsNotOrthonormal { .. } => FkStatus::RowsNotOrthonormal,
            FrameError::UnsupportedDimension(_) => FkStatus::UnsupportedDimension,
            FrameError::DegeneratePair { .. } => FkStatus::DegeneratePair,
            FrameError::NotUnitNorm { .. } => FkStatus::NotUnitNorm,
            FrameError::TrivialFrame(..) => FkStatus::TrivialFrame,
            FrameError::WrongCount { .. } => FkStatus::WrongCount,
            FrameError::NotParseval { .. } => FkStatus::NotParseval,
            FrameError::WrongDimension { .. } => FkStatus::WrongDimension,
        }
    }
}

/// Why a frame was found not scalable.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FkReason {
    None = 0,
    ContainsOrthonormalPair = 1,
    RatioInconsistent = 2,
    IdentityViolated = 3,
    WeightOutOfRange = 4,
    ScaledFrameNotParseval = 5,
}

impl From<Option<FailureReason>> for FkReason {
    fn from(r: Option<FailureReason>) -> Self {
        match r {
            None => FkReason::None,
            Some(FailureReason::ContainsOrthonormalPair) => FkReason::ContainsOrthonormalPair,
            Some(FailureReason::RatioInconsistent) => FkReason::RatioInconsistent,
            Some(FailureReason::IdentityViolated) => FkReason::IdentityViolated,
            Some(FailureReason::WeightOutOfRange) => FkReason::WeightOutOfRange,
            Some(FailureReason::ScaledFrameNotParseval) => FkReason::ScaledFrameNotParseval,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct FkTightness {
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub residual: f64,
    pub parseval_deviation: f64,
    pub trace_residual: f64,
    pub is_tight: bool,
    pub is_parseval: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct FkVerdict {
    pub scalable: bool,
    pub reason: FkReason,
    /// NaN when the pipeline stopped before computing it.
    pub max_identity_residual: f64,
    /// NaN when the pipeline stopped before computing it.
    pub ratio_spread: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct FkAudit {
    pub checks: usize,
    pub failures: usize,
    pub skipped: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

struct Fail(FkStatus, String);

impl From<FrameError> for Fail {
    fn from(e: FrameError) -> Self {
        Fail(FkStatus::from(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(FkStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> FkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            FkStatus::Ok
        }
        Ok(Err(Fail(status, message))) => {
            set_error(&message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            FkStatus::Panic
        }
    }
}

unsafe fn frame_ref<'a>(frame: *const FkFrame, what: &str) -> Result<&'a FrameMatrix, Fail> {
    frame.as_ref().map(|f| &f.inner).ok_or_else(|| null(what))
}

unsafe fn put_frame(out: *mut *mut FkFrame, frame: FrameMatrix) {
    *out = Box::into_raw(Box::new(FkFrame { inner: frame }));
}

/// Copies `n * count` column-major entries into a new frame.
///
/// # Safety
/// `data` must point to `n * count` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fk_frame_new(
    n: usize,
    count: usize,
    data: *const f64,
    out: *mut *mut FkFrame,
) -> FkStatus {
    guard(|| {
        if data.is_null() {
            return Err(null("data"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let len = n
            .checked_mul(count)
            .ok_or_else(|| Fail(FkStatus::InvalidShape, "size overflow".into()))?;
        let slice = std::slice::from_raw_parts(data, len);
        if n == 0 || count == 0 {
            return Err(FrameError::InvalidShape(format!("{n} x {count}")).into());
        }
        let columns: Vec<&[f64]> = slice.chunks(n).collect();
        put_frame(out, FrameMatrix::from_columns(&columns)?);
        Ok(())
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `frame` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn fk_frame_free(frame: *mut FkFrame) {
    if !frame.is_null() {
        drop(Box::from_raw(frame));
    }
}

/// Ambient dimension `n`; 0 for a null handle.
///
/// # Safety
/// `frame` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fk_frame_dim(frame: *const FkFrame) -> usize {
    frame.as_ref().map_or(0, |f| f.inner.dim())
}

/// Number of vectors `N`; 0 for a null handle.
///
/// # Safety
/// `frame` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fk_frame_count(frame: *const FkFrame) -> usize {
    frame.as_ref().map_or(0, |f| f.inner.count())
}

/// Writes the column-major entries into `out` (`len >= n * N`).
///
/// # Safety
/// `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn fk_frame_copy_data(
    frame: *const FkFrame,
    out: *mut f64,
    len: usize,
) -> FkStatus {
    guard(|| {
        let f = frame_ref(frame, "frame")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let data = f.matrix().as_slice();
        if len < data.len() {
            return Err(Fail(
                FkStatus::BufferTooSmall,
                format!("buffer holds {len}, need {}", data.len()),
            ));
        }
        ptr::copy_nonoverlapping(data.as_ptr(), out, data.len());
        Ok(())
    })
}

/// Triangular Parseval `(n+1)`-frame whose last vector is the seed.
///
/// # Safety
/// `seed` must point to `n` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fk_construct(
    seed: *const f64,
    n: usize,
    out: *mut *mut FkFrame,
) -> FkStatus {
    guard(|| {
        if seed.is_null() {
            return Err(null("seed"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let w = SeedVector::new(std::slice::from_raw_parts(seed, n).to_vec())?;
        put_frame(out, construct(&w)?.frame);
        Ok(())
    })
}

/// Deterministic random Parseval frame of `count` vectors in ℝⁿ.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fk_random_parseval(
    n: usize,
    count: usize,
    seed: u64,
    out: *mut *mut FkFrame,
) -> FkStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        put_frame(out, random_parseval(n, count, seed)?);
        Ok(())
    })
}

/// # Safety
/// `frame` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fk_verify(
    frame: *const FkFrame,
    tol: f64,
    out: *mut FkTightness,
) -> FkStatus {
    guard(|| {
        let f = frame_ref(frame, "frame")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let r = verify(f, tol);
        *out = FkTightness {
            lower_bound: r.lower_bound,
            upper_bound: r.upper_bound,
            residual: r.residual,
            parseval_deviation: r.parseval_deviation,
            trace_residual: r.trace_residual,
            is_tight: r.is_tight,
            is_parseval: r.is_parseval,
        };
        Ok(())
    })
}

/// Scalability decision for a unit-norm `(n+1)`-frame. When scalable and
/// `weights` is non-null, the `N` lengths are written to it.
///
/// # Safety
/// `weights` must be null or point to `weights_len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn fk_decide_scalability(
    frame: *const FkFrame,
    tol: f64,
    out: *mut FkVerdict,
    weights: *mut f64,
    weights_len: usize,
) -> FkStatus {
    guard(|| {
        let f = frame_ref(frame, "frame")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let v = decide_scalability(f, tol)?;
        if let (Some(w), false) = (&v.weights, weights.is_null()) {
            write_weights(w.lengths(), weights, weights_len)?;
        }
        *out = FkVerdict {
            scalable: v.scalable,
            reason: v.reason.into(),
            max_identity_residual: v.max_identity_residual,
            ratio_spread: v.ratio_spread,
        };
        Ok(())
    })
}

/// Least-squares oracle; `weights` receives the lengths when scalable.
///
/// # Safety
/// `weights` must be null or point to `weights_len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn fk_oracle_scale(
    frame: *const FkFrame,
    scalable: *mut bool,
    weights: *mut f64,
    weights_len: usize,
) -> FkStatus {
    guard(|| {
        let f = frame_ref(frame, "frame")?;
        if scalable.is_null() {
            return Err(null("scalable"));
        }
        let w = oracle_scale(f);
        if let (Some(w), false) = (&w, weights.is_null()) {
            write_weights(w.lengths(), weights, weights_len)?;
        }
        *scalable = w.is_some();
        Ok(())
    })
}

unsafe fn write_weights(lengths: &[f64], out: *mut f64, len: usize) -> Result<(), Fail> {
    if len < lengths.len() {
        return Err(Fail(
            FkStatus::BufferTooSmall,
            format!("weights buffer holds {len}, need {}", lengths.len()),
        ));
    }
    ptr::copy_nonoverlapping(lengths.as_ptr(), out, lengths.len());
    Ok(())
}

/// Canonical representative up to rotation and sign flips.
///
/// # Safety
/// `frame` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fk_canonicalize(
    frame: *const FkFrame,
    out: *mut *mut FkFrame,
) -> FkStatus {
    guard(|| {
        let f = frame_ref(frame, "frame")?;
        if out.is_null() {
            return Err(null("out"));
        }
        put_frame(out, canonicalize(f)?.frame);
        Ok(())
    })
}

/// # Safety
/// `a`, `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fk_equivalent(
    a: *const FkFrame,
    b: *const FkFrame,
    tol: f64,
    out: *mut bool,
) -> FkStatus {
    guard(|| {
        let (a, b) = (frame_ref(a, "a")?, frame_ref(b, "b")?);
        if out.is_null() {
            return Err(null("out"));
        }
        *out = equivalent(a, b, tol)?;
        Ok(())
    })
}

/// Check counts from the identity audit.
///
/// # Safety
/// `frame` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fk_audit(frame: *const FkFrame, tol: f64, out: *mut FkAudit) -> FkStatus {
    guard(|| {
        let f = frame_ref(frame, "frame")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let report = audit(f, tol);
        *out = FkAudit {
            checks: report.checks.len(),
            failures: report.failures().count(),
            skipped: report
                .checks
                .iter()
                .filter(|c| matches!(c.status, framekit::diagnostics::CheckStatus::Skipped(_)))
                .count(),
        };
        Ok(())
    })
}

/// Message for the last failed call on this thread; empty after success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn fk_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fk_version() -> *const c_char {
    static VERSION: &CStr =
        match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
            Ok(v) => v,
            Err(_) => panic!("version string"),
        };
    VERSION.as_ptr()
}
