//! C ABI over `vsal-core`.
//!
//! Every fallible function returns a [`VsalStatus`]. On failure a message is
//! stored per thread and can be read with [`vsal_last_error_message`].
//! Maps and similarity matrices are opaque handles owned by the caller and
//! released with the matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::slice;

use vsal_core::density::{density_map, DensityParams, FixationRecord, Pixel};
use vsal_core::fusion::{fuse_detailed, FusionParams};
use vsal_core::io::{read_map, write_map, MapFormat};
use vsal_core::selection::{objective, SelectionMask, SelectionParams, SimilarityMatrix, Solver};
use vsal_core::{metrics, Error, SaliencyMap};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VsalStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    AllZeroMap = 4,
    /// Fusion or metric inputs leave the result undefined.
    Undefined = 5,
    TooManyPaths = 6,
    Io = 7,
    Format = 8,
    /// A Rust panic was caught at the boundary.
    Internal = 9,
}

/// One gaze sample: time in seconds, position in pixels.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct VsalFixation {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

/// Integer pixel coordinate.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct VsalPixel {
    pub x: usize,
    pub y: usize,
}

/// Opaque saliency map.
pub struct VsalMap {
    inner: SaliencyMap,
}

/// Opaque pairwise similarity matrix between predictors.
pub struct VsalSimilarity {
    inner: SimilarityMatrix,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> VsalStatus {
    match err {
        Error::Stage { source, .. } => status_of(source),
        Error::DimensionMismatch(..) | Error::BadLength { .. } => VsalStatus::DimensionMismatch,
        Error::AllZeroMap => VsalStatus::AllZeroMap,
        Error::ZeroEntropyDenominator
        | Error::DegenerateScores
        | Error::NoFixations
        | Error::NoNegatives
        | Error::EmptyPool
        | Error::ZeroVariance => VsalStatus::Undefined,
        Error::TooManyPaths(_) => VsalStatus::TooManyPaths,
        Error::Io(_) => VsalStatus::Io,
        Error::Parse { .. }
        | Error::MissingHeader(_)
        | Error::ManifestInvalid(_)
        | Error::FrameDecode { .. }
        | Error::MapFormat { .. }
        | Error::Json(_) => VsalStatus::Format,
        _ => VsalStatus::InvalidArgument,
    }
}

struct Fail(VsalStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(VsalStatus::NullPointer, format!("`{what}` is null"))
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> VsalStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => VsalStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            VsalStatus::Internal
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn slice_of<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn path_of<'a>(p: *const c_char) -> Result<&'a Path, Fail> {
    if p.is_null() {
        return Err(null("path"));
    }
    CStr::from_ptr(p).to_str().map(Path::new).map_err(|_| {
        Fail(
            VsalStatus::InvalidArgument,
            "path is not valid UTF-8".into(),
        )
    })
}

unsafe fn emit_map(out: *mut *mut VsalMap, map: SaliencyMap) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(VsalMap { inner: map }));
    Ok(())
}

fn pixels(p: &[VsalPixel]) -> Vec<Pixel> {
    p.iter().map(|q| Pixel::new(q.x, q.y)).collect()
}

/// Message for the most recent failure on this thread, or NULL.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn vsal_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn vsal_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a map from `width * height` row-major values.
///
/// # Safety
/// `values` must point to `width * height` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vsal_map_new(
    width: usize,
    height: usize,
    values: *const f64,
    out: *mut *mut VsalMap,
) -> VsalStatus {
    guard(|| {
        let n = width
            .checked_mul(height)
            .ok_or_else(|| Fail(VsalStatus::InvalidArgument, "size overflow".into()))?;
        let vals = slice_of(values, n, "values")?;
        emit_map(out, SaliencyMap::new(width, height, vals.to_vec())?)
    })
}

/// Releases a map. NULL is ignored.
///
/// # Safety
/// `map` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn vsal_map_free(map: *mut VsalMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// Width in pixels, or 0 for NULL.
///
/// # Safety
/// `map` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vsal_map_width(map: *const VsalMap) -> usize {
    map.as_ref().map_or(0, |m| m.inner.width())
}

/// Height in pixels, or 0 for NULL.
///
/// # Safety
/// `map` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vsal_map_height(map: *const VsalMap) -> usize {
    map.as_ref().map_or(0, |m| m.inner.height())
}

/// Copies the row-major values into `out`, which must hold exactly `len` doubles.
///
/// # Safety
/// `map` must be live; `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn vsal_map_copy_values(
    map: *const VsalMap,
    out: *mut f64,
    len: usize,
) -> VsalStatus {
    guard(|| {
        let m = &borrow(map, "map")?.inner;
        if len != m.len() {
            return Err(Fail(
                VsalStatus::DimensionMismatch,
                format!("buffer holds {len} values, map has {}", m.len()),
            ));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        slice::from_raw_parts_mut(out, len).copy_from_slice(m.values());
        Ok(())
    })
}

/// Reads a `.pfm` or `.pgm` map file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vsal_map_read(path: *const c_char, out: *mut *mut VsalMap) -> VsalStatus {
    guard(|| emit_map(out, read_map(path_of(path)?)?))
}

/// Writes a map as 32-bit PFM.
///
/// # Safety
/// `map` must be live; `path` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn vsal_map_write_pfm(
    map: *const VsalMap,
    path: *const c_char,
) -> VsalStatus {
    guard(|| {
        let m = &borrow(map, "map")?.inner;
        write_map(m, path_of(path)?, MapFormat::Pfm)?;
        Ok(())
    })
}

/// Gaze density at time `t` from `count` fixations.
///
/// # Safety
/// `fixations` must point to `count` records; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vsal_density_map(
    fixations: *const VsalFixation,
    count: usize,
    t: f64,
    width: usize,
    height: usize,
    sigma_d: f64,
    sigma_t: f64,
    cutoff: f64,
    out: *mut *mut VsalMap,
) -> VsalStatus {
    guard(|| {
        if width == 0 || height == 0 {
            return Err(Fail(
                VsalStatus::InvalidArgument,
                "map dimensions must be positive".into(),
            ));
        }
        let params = DensityParams::new(sigma_d, sigma_t, cutoff)?;
        let recs: Vec<FixationRecord> = slice_of(fixations, count, "fixations")?
            .iter()
            .map(|f| FixationRecord::new("", f.t, f.x, f.y))
            .collect();
        emit_map(out, density_map(&recs, t, width, height, &params))
    })
}

/// Builds an `m x m` similarity matrix from row-major entries.
///
/// # Safety
/// `entries` must point to `m * m` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vsal_similarity_new(
    entries: *const f64,
    m: usize,
    out: *mut *mut VsalSimilarity,
) -> VsalStatus {
    guard(|| {
        let vals = slice_of(entries, m.saturating_mul(m), "entries")?;
        let labels = (1..=m).map(|i| format!("p{i}")).collect();
        let sim = SimilarityMatrix::new(labels, vals.to_vec())?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = Box::into_raw(Box::new(VsalSimilarity { inner: sim }));
        Ok(())
    })
}

/// Releases a similarity matrix. NULL is ignored.
///
/// # Safety
/// `sim` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn vsal_similarity_free(sim: *mut VsalSimilarity) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Picks a predictor subset. Writes 0/1 flags into `mask_out` (length `m`).
/// `greedy` non-zero selects the local-search solver.
///
/// # Safety
/// `sim` must be live; `mask_out` must point to `m` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn vsal_select(
    sim: *const VsalSimilarity,
    lambda_d: f64,
    epsilon: f64,
    greedy: i32,
    mask_out: *mut u8,
    m: usize,
) -> VsalStatus {
    guard(|| {
        let s = &borrow(sim, "sim")?.inner;
        if m != s.m() {
            return Err(Fail(
                VsalStatus::DimensionMismatch,
                format!("mask length {m}, matrix has {}", s.m()),
            ));
        }
        if mask_out.is_null() {
            return Err(null("mask_out"));
        }
        let solver = if greedy != 0 {
            Solver::Greedy
        } else {
            Solver::Exhaustive
        };
        let mask = solver.solve(s, &SelectionParams::new(lambda_d, epsilon)?)?;
        for (o, &b) in slice::from_raw_parts_mut(mask_out, m)
            .iter_mut()
            .zip(mask.alpha())
        {
            *o = b as u8;
        }
        Ok(())
    })
}

/// Objective value of a 0/1 mask of length `m`.
///
/// # Safety
/// `sim` must be live; `mask` must point to `m` bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vsal_objective(
    sim: *const VsalSimilarity,
    mask: *const u8,
    m: usize,
    lambda_d: f64,
    epsilon: f64,
    out: *mut f64,
) -> VsalStatus {
    guard(|| {
        let s = &borrow(sim, "sim")?.inner;
        if m != s.m() {
            return Err(Fail(
                VsalStatus::DimensionMismatch,
                format!("mask length {m}, matrix has {}", s.m()),
            ));
        }
        let alpha =
            SelectionMask::new(slice_of(mask, m, "mask")?.iter().map(|&b| b != 0).collect())?;
        let value = objective(&alpha, s, &SelectionParams::new(lambda_d, epsilon)?);
        *out.as_mut().ok_or_else(|| null("out"))? = value;
        Ok(())
    })
}

/// Fuses a spatial and a temporal map. `lambda_out` may be NULL.
///
/// # Safety
/// Both maps must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vsal_fuse(
    spatial: *const VsalMap,
    temporal: *const VsalMap,
    omega: f64,
    out: *mut *mut VsalMap,
    lambda_out: *mut f64,
) -> VsalStatus {
    guard(|| {
        let s = &borrow(spatial, "spatial")?.inner;
        let t = &borrow(temporal, "temporal")?.inner;
        let outcome = fuse_detailed(s, t, &FusionParams::new(omega)?)?;
        if let Some(l) = lambda_out.as_mut() {
            *l = outcome.lambda;
        }
        emit_map(out, outcome.map)
    })
}

/// Area under the ROC curve, fixated pixels against all others.
///
/// # Safety
/// `map` must be live; `fixations` must point to `count` pixels; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vsal_metric_auc(
    map: *const VsalMap,
    fixations: *const VsalPixel,
    count: usize,
    out: *mut f64,
) -> VsalStatus {
    guard(|| {
        let m = &borrow(map, "map")?.inner;
        let v = metrics::auc(m, &pixels(slice_of(fixations, count, "fixations")?))?;
        *out.as_mut().ok_or_else(|| null("out"))? = v;
        Ok(())
    })
}

/// Shuffled AUC with negatives drawn from `pool`.
///
/// # Safety
/// `map` must be live; pointer arguments must cover their counts; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vsal_metric_sauc(
    map: *const VsalMap,
    fixations: *const VsalPixel,
    count: usize,
    pool: *const VsalPixel,
    pool_count: usize,
    out: *mut f64,
) -> VsalStatus {
    guard(|| {
        let m = &borrow(map, "map")?.inner;
        let fix = pixels(slice_of(fixations, count, "fixations")?);
        let neg = pixels(slice_of(pool, pool_count, "pool")?);
        let v = metrics::sauc(m, &fix, &neg)?;
        *out.as_mut().ok_or_else(|| null("out"))? = v;
        Ok(())
    })
}

/// Normalized scanpath saliency.
///
/// # Safety
/// `map` must be live; `fixations` must point to `count` pixels; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vsal_metric_nss(
    map: *const VsalMap,
    fixations: *const VsalPixel,
    count: usize,
    out: *mut f64,
) -> VsalStatus {
    guard(|| {
        let m = &borrow(map, "map")?.inner;
        let v = metrics::nss(m, &pixels(slice_of(fixations, count, "fixations")?))?;
        *out.as_mut().ok_or_else(|| null("out"))? = v;
        Ok(())
    })
}

/// Histogram intersection against a ground-truth map.
///
/// # Safety
/// Both maps must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vsal_metric_sim(
    pred: *const VsalMap,
    gt: *const VsalMap,
    out: *mut f64,
) -> VsalStatus {
    guard(|| {
        let v = metrics::sim(&borrow(pred, "pred")?.inner, &borrow(gt, "gt")?.inner)?;
        *out.as_mut().ok_or_else(|| null("out"))? = v;
        Ok(())
    })
}

/// Pearson correlation against a ground-truth map.
///
/// # Safety
/// Both maps must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vsal_metric_cc(
    pred: *const VsalMap,
    gt: *const VsalMap,
    out: *mut f64,
) -> VsalStatus {
    guard(|| {
        let v = metrics::cc(&borrow(pred, "pred")?.inner, &borrow(gt, "gt")?.inner)?;
        *out.as_mut().ok_or_else(|| null("out"))? = v;
        Ok(())
    })
}
