//! C ABI over the echoaug engine.
//!
//! Every fallible call returns an [`EaStatus`]; on failure a message for the
//! calling thread is available from [`ea_last_error_message`]. Objects cross
//! the boundary as opaque handles, each released by its own `_free` function.
//! Panics never unwind into the caller; they surface as `EA_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use echoaug::pipeline::{self, Pipeline, PipelineSpec};
use echoaug::registry::PresetRegistry;
use echoaug::{fan_mask, metrics, BinaryMask, EchoError, GrayImage, Sample};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    PresetNotFound = 4,
    FanMaskRequired = 5,
    DimensionMismatch = 6,
    EmptyMask = 7,
    Panic = 99,
}

/// Grayscale image with values in `[0, 1]`.
pub struct EaImage(GrayImage);

/// Binary mask.
pub struct EaMask(BinaryMask);

/// Image with its LV mask and optional fan mask.
pub struct EaSample(Sample);

/// Resolved augmentation pipeline.
pub struct EaPipeline(Pipeline);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = CString::new(text).ok());
}

fn status_of(err: &EchoError) -> EaStatus {
    match err {
        EchoError::Io { .. } | EchoError::Codec { .. } => EaStatus::Io,
        EchoError::PresetNotFound { .. } => EaStatus::PresetNotFound,
        EchoError::FanMaskRequired { .. } => EaStatus::FanMaskRequired,
        EchoError::DimensionMismatch { .. } => EaStatus::DimensionMismatch,
        EchoError::EmptyMask(_) => EaStatus::EmptyMask,
        _ => EaStatus::InvalidArgument,
    }
}

/// Runs `f`, records any error or panic, and converts the outcome to a status.
fn guard(f: impl FnOnce() -> Result<(), EaStatus>) -> EaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
            EaStatus::Ok
        }
        Ok(Err(status)) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic in echoaug".into());
            set_last_error(msg);
            EaStatus::Panic
        }
    }
}

fn fail(err: EchoError) -> EaStatus {
    set_last_error(err.to_string());
    status_of(&err)
}

fn null(what: &str) -> EaStatus {
    set_last_error(format!("{what} is NULL"));
    EaStatus::NullPointer
}

unsafe fn as_ref<'a, T>(p: *const T, what: &str) -> Result<&'a T, EaStatus> {
    // SAFETY: the caller promises `p` is NULL or a live handle.
    unsafe { p.as_ref() }.ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut *mut T, value: T) -> Result<(), EaStatus> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    // SAFETY: checked non-null; the caller provides a writable slot.
    unsafe { *out = Box::into_raw(Box::new(value)) };
    Ok(())
}

unsafe fn byte_slice<'a>(data: *const u8, len: usize, what: &str) -> Result<&'a [u8], EaStatus> {
    if data.is_null() {
        return Err(null(what));
    }
    // SAFETY: the caller promises `len` readable bytes at `data`.
    Ok(unsafe { std::slice::from_raw_parts(data, len) })
}

unsafe fn free_handle<T>(p: *mut T) {
    if !p.is_null() {
        // SAFETY: `p` came from `Box::into_raw` in this library and is freed once.
        drop(unsafe { Box::from_raw(p) });
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ea_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message describing the last failure on this thread, or NULL.
/// The pointer stays valid until the next echoaug call on the same thread.
#[no_mangle]
pub extern "C" fn ea_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Builds an image from `width * height` 8-bit samples (row-major).
///
/// # Safety
/// `data` must point to `width * height` readable bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ea_image_from_u8(data: *const u8, width: usize, height: usize, out: *mut *mut EaImage) -> EaStatus {
    guard(|| {
        let len = width.checked_mul(height).ok_or_else(|| fail(EchoError::validation("image too large")))?;
        let bytes = unsafe { byte_slice(data, len, "data") }?;
        let img = GrayImage::from_u8(width, height, bytes).map_err(fail)?;
        unsafe { write_out(out, EaImage(img)) }
    })
}

/// Writes the image dimensions.
///
/// # Safety
/// `image` must be a live handle; `width` and `height` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ea_image_dims(image: *const EaImage, width: *mut usize, height: *mut usize) -> EaStatus {
    guard(|| {
        let img = unsafe { as_ref(image, "image") }?;
        if width.is_null() || height.is_null() {
            return Err(null("output pointer"));
        }
        let (w, h) = img.0.dims();
        unsafe {
            *width = w;
            *height = h;
        }
        Ok(())
    })
}

/// Quantizes the image to 8 bits into `buf`, which must hold `width * height` bytes.
///
/// # Safety
/// `image` must be a live handle and `buf` must point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn ea_image_to_u8(image: *const EaImage, buf: *mut u8, len: usize) -> EaStatus {
    guard(|| {
        let img = unsafe { as_ref(image, "image") }?;
        let bytes = img.0.to_u8();
        copy_out(&bytes, buf, len)
    })
}

fn copy_out(bytes: &[u8], buf: *mut u8, len: usize) -> Result<(), EaStatus> {
    if buf.is_null() {
        return Err(null("buf"));
    }
    if len < bytes.len() {
        return Err(fail(EchoError::validation(format!("buffer holds {len} bytes, need {}", bytes.len()))));
    }
    // SAFETY: `buf` has at least `bytes.len()` writable bytes (checked above).
    unsafe { ptr::copy_nonoverlapping(bytes.as_ptr(), buf, bytes.len()) };
    Ok(())
}

/// # Safety
/// `image` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ea_image_free(image: *mut EaImage) {
    unsafe { free_handle(image) }
}

/// Builds a mask from 8-bit samples; any nonzero byte is foreground.
///
/// # Safety
/// `data` must point to `width * height` readable bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ea_mask_from_u8(data: *const u8, width: usize, height: usize, out: *mut *mut EaMask) -> EaStatus {
    guard(|| {
        let len = width.checked_mul(height).ok_or_else(|| fail(EchoError::validation("mask too large")))?;
        let bytes = unsafe { byte_slice(data, len, "data") }?;
        let mask = BinaryMask::from_u8_nonzero(width, height, bytes).map_err(fail)?;
        unsafe { write_out(out, EaMask(mask)) }
    })
}

/// Writes the mask as `{0, 1}` bytes into `buf`.
///
/// # Safety
/// `mask` must be a live handle and `buf` must point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn ea_mask_to_u8(mask: *const EaMask, buf: *mut u8, len: usize) -> EaStatus {
    guard(|| {
        let m = unsafe { as_ref(mask, "mask") }?;
        copy_out(m.0.values(), buf, len)
    })
}

/// # Safety
/// `mask` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ea_mask_free(mask: *mut EaMask) {
    unsafe { free_handle(mask) }
}

/// Bundles copies of an image, its LV mask and an optional fan mask (`fan` may be NULL).
///
/// # Safety
/// `image` and `lv_mask` must be live handles, `fan` NULL or live, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ea_sample_new(
    image: *const EaImage,
    lv_mask: *const EaMask,
    fan: *const EaMask,
    out: *mut *mut EaSample,
) -> EaStatus {
    guard(|| {
        let img = unsafe { as_ref(image, "image") }?;
        let lv = unsafe { as_ref(lv_mask, "lv_mask") }?;
        let fan = unsafe { fan.as_ref() }.map(|m| m.0.clone());
        let sample = Sample::new(img.0.clone(), lv.0.clone(), fan).map_err(fail)?;
        unsafe { write_out(out, EaSample(sample)) }
    })
}

/// Copies the sample's image into a new handle.
///
/// # Safety
/// `sample` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ea_sample_image(sample: *const EaSample, out: *mut *mut EaImage) -> EaStatus {
    guard(|| {
        let s = unsafe { as_ref(sample, "sample") }?;
        unsafe { write_out(out, EaImage(s.0.image.clone())) }
    })
}

/// Copies the sample's LV mask into a new handle.
///
/// # Safety
/// `sample` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ea_sample_lv_mask(sample: *const EaSample, out: *mut *mut EaMask) -> EaStatus {
    guard(|| {
        let s = unsafe { as_ref(sample, "sample") }?;
        unsafe { write_out(out, EaMask(s.0.lv_mask.clone())) }
    })
}

/// # Safety
/// `sample` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ea_sample_free(sample: *mut EaSample) {
    unsafe { free_handle(sample) }
}

/// Parses a pipeline JSON document and resolves it against the built-in presets.
///
/// # Safety
/// `json` must be a NUL-terminated UTF-8 string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ea_pipeline_from_json(json: *const c_char, out: *mut *mut EaPipeline) -> EaStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        // SAFETY: non-null and NUL-terminated per the contract.
        let text = unsafe { CStr::from_ptr(json) }
            .to_str()
            .map_err(|_| fail(EchoError::validation("pipeline JSON is not UTF-8")))?;
        let spec = PipelineSpec::from_json(text).map_err(fail)?;
        let pipeline = Pipeline::from_spec(&spec, PresetRegistry::builtin()).map_err(fail)?;
        unsafe { write_out(out, EaPipeline(pipeline)) }
    })
}

/// Applies the pipeline to a sample; `sample_index` selects the random streams.
///
/// # Safety
/// `pipeline` and `sample` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ea_pipeline_apply(
    pipeline: *const EaPipeline,
    sample: *const EaSample,
    sample_index: u64,
    out: *mut *mut EaSample,
) -> EaStatus {
    guard(|| {
        let p = unsafe { as_ref(pipeline, "pipeline") }?;
        let s = unsafe { as_ref(sample, "sample") }?;
        let result = pipeline::apply_pipeline(&p.0, &s.0, sample_index).map_err(fail)?;
        unsafe { write_out(out, EaSample(result)) }
    })
}

/// # Safety
/// `pipeline` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ea_pipeline_free(pipeline: *mut EaPipeline) {
    unsafe { free_handle(pipeline) }
}

/// Extracts the fan sector of an image with the default morphology settings.
///
/// # Safety
/// `image` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ea_fan_mask_extract(image: *const EaImage, out: *mut *mut EaMask) -> EaStatus {
    guard(|| {
        let img = unsafe { as_ref(image, "image") }?;
        let mask = fan_mask::extract_fan_mask(&img.0).map_err(fail)?;
        unsafe { write_out(out, EaMask(mask)) }
    })
}

unsafe fn overlap_metric(
    a: *const EaMask,
    b: *const EaMask,
    out: *mut f64,
    f: fn(&BinaryMask, &BinaryMask) -> echoaug::Result<f64>,
) -> EaStatus {
    guard(|| {
        let a = unsafe { as_ref(a, "pred") }?;
        let b = unsafe { as_ref(b, "truth") }?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let v = f(&a.0, &b.0).map_err(fail)?;
        unsafe { *out = v };
        Ok(())
    })
}

/// Dice coefficient of two masks; two empty masks score 1.
///
/// # Safety
/// `pred` and `truth` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ea_dice(pred: *const EaMask, truth: *const EaMask, out: *mut f64) -> EaStatus {
    unsafe { overlap_metric(pred, truth, out, metrics::dice) }
}

/// Intersection over union of two masks; two empty masks score 1.
///
/// # Safety
/// `pred` and `truth` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ea_iou(pred: *const EaMask, truth: *const EaMask, out: *mut f64) -> EaStatus {
    unsafe { overlap_metric(pred, truth, out, metrics::iou) }
}

/// The built-in preset registry as JSON. Release with [`ea_string_free`].
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ea_registry_json(out: *mut *mut c_char) -> EaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let json = PresetRegistry::builtin().to_json().map_err(fail)?;
        let s = CString::new(json).map_err(|_| fail(EchoError::validation("registry JSON contains NUL")))?;
        unsafe { *out = s.into_raw() };
        Ok(())
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ea_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: `s` came from `CString::into_raw`.
        drop(unsafe { CString::from_raw(s) });
    }
}
