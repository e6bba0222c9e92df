//! C ABI over `shapevec`.
//!
//! Objects are opaque heap handles created by `*_new` / `*_read` /
//! `shapevec_encode` and released with the matching `*_free`. Every
//! fallible call returns a [`ShapevecStatus`]; on failure
//! [`shapevec_last_error`] gives a message for the calling thread.
//! Outputs are written through pointers only on success.
//!
//! Decoded polygons use the batch layout: for shape `b`, x coordinates at
//! `out[(2b)·N + j]` and y coordinates at `out[(2b+1)·N + j]`.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nalgebra::DMatrix;
use shapevec::codec::Encoder;
use shapevec::geometry::io::{read_mask, write_pbm};
use shapevec::{
    decode_one, iou, shape_loss, BasisKind, BatchDecoder, BinaryMask, CoefficientVector, DecodeBatch, EncodeOptions,
    Point2, ShapeError, ShapeVector,
};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapevecStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    EmptyShape = 3,
    CenterOutside = 4,
    DimensionMismatch = 5,
    InvalidContour = 6,
    Degenerate = 7,
    TooManyCoefficients = 8,
    SingularFit = 9,
    Parse = 10,
    Io = 11,
    Panic = 12,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapevecBasis {
    Chebyshev = 0,
    FourierFree = 1,
    FourierFixed = 2,
    Monomial = 3,
}

/// Basis parameters arrive as plain integers so that an out-of-range
/// value from C is an error rather than undefined behavior.
fn basis_arg(code: u32) -> Result<BasisKind, Fail> {
    Ok(match code {
        0 => BasisKind::Chebyshev,
        1 => BasisKind::FourierFree,
        2 => BasisKind::FourierFixed,
        3 => BasisKind::Monomial,
        other => return Err(invalid(format!("unknown basis code {other}"))),
    })
}

impl From<BasisKind> for ShapevecBasis {
    fn from(b: BasisKind) -> Self {
        match b {
            BasisKind::Chebyshev => ShapevecBasis::Chebyshev,
            BasisKind::FourierFree => ShapevecBasis::FourierFree,
            BasisKind::FourierFixed => ShapevecBasis::FourierFixed,
            BasisKind::Monomial => ShapevecBasis::Monomial,
        }
    }
}

/// Binary mask handle.
pub struct ShapevecMask(BinaryMask);

/// Shape vector handle.
pub struct ShapevecVector(ShapeVector);

/// Batch decoder handle bound to one basis, length and point count.
pub struct ShapevecDecoder {
    inner: BatchDecoder,
    basis: BasisKind,
    l: usize,
    points: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &ShapeError) -> ShapevecStatus {
    match e {
        ShapeError::EmptyShape => ShapevecStatus::EmptyShape,
        ShapeError::CenterOutside { .. } => ShapevecStatus::CenterOutside,
        ShapeError::DimensionMismatch(_) => ShapevecStatus::DimensionMismatch,
        ShapeError::InvalidContour(_) => ShapevecStatus::InvalidContour,
        ShapeError::Degenerate(_) => ShapevecStatus::Degenerate,
        ShapeError::TooManyCoefficients { .. } => ShapevecStatus::TooManyCoefficients,
        ShapeError::SingularFit => ShapevecStatus::SingularFit,
        ShapeError::InvalidParameter(_) => ShapevecStatus::InvalidArgument,
        ShapeError::Parse { .. } => ShapevecStatus::Parse,
        ShapeError::Io { .. } => ShapevecStatus::Io,
    }
}

struct Fail(ShapevecStatus, String);

impl From<ShapeError> for Fail {
    fn from(e: ShapeError) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(ShapevecStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Fail {
    Fail(ShapevecStatus::InvalidArgument, msg.into())
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> ShapevecStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            ShapevecStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            ShapevecStatus::Panic
        }
    }
}

unsafe fn as_ref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn path_arg(p: *const c_char) -> Result<std::path::PathBuf, Fail> {
    if p.is_null() {
        return Err(null("path"));
    }
    let s = CStr::from_ptr(p).to_str().map_err(|_| invalid("path is not UTF-8"))?;
    Ok(s.into())
}

unsafe fn out_handle<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a, T>(p: *mut T, len: usize, what: &str) -> Result<&'a mut [T], Fail> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

/// Message for the last failed call on this thread; empty after a
/// success. Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn shapevec_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn shapevec_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a `width × height` mask from row-major bytes (non-zero =
/// foreground).
#[no_mangle]
pub unsafe extern "C" fn shapevec_mask_new(
    width: usize,
    height: usize,
    pixels: *const u8,
    out: *mut *mut ShapevecMask,
) -> ShapevecStatus {
    guard(|| {
        let n = width
            .checked_mul(height)
            .ok_or_else(|| invalid("mask size overflows"))?;
        let px = slice(pixels, n, "pixels")?;
        let mask = BinaryMask::new(width, height, px.iter().map(|&v| v != 0).collect())?;
        out_handle(out, ShapevecMask(mask))
    })
}

/// Reads a PBM (P4) or PNG mask.
#[no_mangle]
pub unsafe extern "C" fn shapevec_mask_read(path: *const c_char, out: *mut *mut ShapevecMask) -> ShapevecStatus {
    guard(|| {
        let mask = read_mask(path_arg(path)?)?;
        out_handle(out, ShapevecMask(mask))
    })
}

/// Writes a mask as binary PBM.
#[no_mangle]
pub unsafe extern "C" fn shapevec_mask_write_pbm(mask: *const ShapevecMask, path: *const c_char) -> ShapevecStatus {
    guard(|| {
        let mask = as_ref(mask, "mask")?;
        write_pbm(path_arg(path)?, &mask.0)?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn shapevec_mask_size(
    mask: *const ShapevecMask,
    width: *mut usize,
    height: *mut usize,
) -> ShapevecStatus {
    guard(|| {
        let mask = as_ref(mask, "mask")?;
        if width.is_null() || height.is_null() {
            return Err(null("width/height"));
        }
        *width = mask.0.width();
        *height = mask.0.height();
        Ok(())
    })
}

/// Copies the mask into `pixels` (row-major, 1 = foreground), which must
/// hold `width × height` bytes.
#[no_mangle]
pub unsafe extern "C" fn shapevec_mask_pixels(
    mask: *const ShapevecMask,
    pixels: *mut u8,
    len: usize,
) -> ShapevecStatus {
    guard(|| {
        let mask = as_ref(mask, "mask")?;
        let bits = mask.0.bits();
        if len != bits.len() {
            return Err(invalid(format!("buffer holds {len} bytes, mask has {}", bits.len())));
        }
        for (dst, &b) in slice_mut(pixels, len, "pixels")?.iter_mut().zip(bits) {
            *dst = b as u8;
        }
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn shapevec_mask_free(mask: *mut ShapevecMask) {
    if !mask.is_null() {
        drop(Box::from_raw(mask));
    }
}

/// Intersection over union of two masks of equal size.
#[no_mangle]
pub unsafe extern "C" fn shapevec_iou(a: *const ShapevecMask, b: *const ShapevecMask, out: *mut f64) -> ShapevecStatus {
    guard(|| {
        let v = iou(&as_ref(a, "a")?.0, &as_ref(b, "b")?.0)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = v;
        Ok(())
    })
}

/// Encodes a mask (`basis` is a [`ShapevecBasis`] value): inner center, IR signature at step `tau` radians, and
/// an `l`-coefficient fit in `basis`.
#[no_mangle]
pub unsafe extern "C" fn shapevec_encode(
    mask: *const ShapevecMask,
    basis: u32,
    l: usize,
    tau: f64,
    normalize: bool,
    out: *mut *mut ShapevecVector,
) -> ShapevecStatus {
    guard(|| {
        let mask = as_ref(mask, "mask")?;
        let encoder = Encoder::new(EncodeOptions {
            basis: basis_arg(basis)?,
            l,
            tau,
            normalize,
        })?;
        out_handle(out, ShapevecVector(encoder.encode(&mask.0)?))
    })
}

/// Builds a shape vector from raw parts (`basis` is a [`ShapevecBasis`]
/// value). `scale <= 0` means unnormalized.
#[no_mangle]
pub unsafe extern "C" fn shapevec_vector_new(
    cx: f64,
    cy: f64,
    basis: u32,
    coeffs: *const f64,
    len: usize,
    scale: f64,
    out: *mut *mut ShapevecVector,
) -> ShapevecStatus {
    guard(|| {
        let coeffs = CoefficientVector::new(basis_arg(basis)?, slice(coeffs, len, "coeffs")?.to_vec())?;
        let scale = (scale > 0.0).then_some(scale);
        out_handle(
            out,
            ShapevecVector(ShapeVector::new(Point2::new(cx, cy), coeffs, scale)?),
        )
    })
}

/// Parses a shape vector from its JSON form.
#[no_mangle]
pub unsafe extern "C" fn shapevec_vector_from_json(
    json: *const c_char,
    out: *mut *mut ShapevecVector,
) -> ShapevecStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|_| invalid("json is not UTF-8"))?;
        out_handle(out, ShapevecVector(ShapeVector::from_json(text)?))
    })
}

/// JSON form of a shape vector; release with [`shapevec_string_free`].
/// Returns null if `v` is null.
#[no_mangle]
pub unsafe extern "C" fn shapevec_vector_to_json(v: *const ShapevecVector) -> *mut c_char {
    match v.as_ref() {
        Some(v) => CString::new(v.0.to_json())
            .map(CString::into_raw)
            .unwrap_or(ptr::null_mut()),
        None => {
            set_error("vector is null");
            ptr::null_mut()
        }
    }
}

#[no_mangle]
pub unsafe extern "C" fn shapevec_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Basis, coefficient count, center and scale (0 when unnormalized).
#[no_mangle]
pub unsafe extern "C" fn shapevec_vector_info(
    v: *const ShapevecVector,
    basis: *mut ShapevecBasis,
    len: *mut usize,
    cx: *mut f64,
    cy: *mut f64,
    scale: *mut f64,
) -> ShapevecStatus {
    guard(|| {
        let v = &as_ref(v, "vector")?.0;
        if basis.is_null() || len.is_null() || cx.is_null() || cy.is_null() || scale.is_null() {
            return Err(null("output"));
        }
        *basis = v.coeffs.basis.into();
        *len = v.coeffs.len();
        *cx = v.center.x;
        *cy = v.center.y;
        *scale = v.scale.unwrap_or(0.0);
        Ok(())
    })
}

/// Copies the `len` coefficients into `out`.
#[no_mangle]
pub unsafe extern "C" fn shapevec_vector_coeffs(v: *const ShapevecVector, out: *mut f64, len: usize) -> ShapevecStatus {
    guard(|| {
        let v = &as_ref(v, "vector")?.0;
        if len != v.coeffs.len() {
            return Err(invalid(format!(
                "buffer holds {len} values, vector has {}",
                v.coeffs.len()
            )));
        }
        slice_mut(out, len, "out")?.copy_from_slice(&v.coeffs.coeffs);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn shapevec_vector_free(v: *mut ShapevecVector) {
    if !v.is_null() {
        drop(Box::from_raw(v));
    }
}

/// Decodes one vector into `2 × points` coordinates (xs then ys).
#[no_mangle]
pub unsafe extern "C" fn shapevec_decode_one(
    v: *const ShapevecVector,
    points: usize,
    out: *mut f64,
    len: usize,
) -> ShapevecStatus {
    guard(|| {
        let v = &as_ref(v, "vector")?.0;
        if len != 2 * points {
            return Err(invalid(format!("buffer holds {len} values, need {}", 2 * points)));
        }
        let contour = decode_one(v, points)?;
        let out = slice_mut(out, len, "out")?;
        for (j, p) in contour.vertices().iter().enumerate() {
            out[j] = p.x;
            out[points + j] = p.y;
        }
        Ok(())
    })
}

/// Squared norm of the concatenated center and coefficient residuals.
#[no_mangle]
pub unsafe extern "C" fn shapevec_shape_loss(
    pred: *const ShapevecVector,
    truth: *const ShapevecVector,
    out: *mut f64,
) -> ShapevecStatus {
    guard(|| {
        let (p, t) = (&as_ref(pred, "pred")?.0, &as_ref(truth, "truth")?.0);
        let v = shape_loss(p.center, &p.coeffs, t.center, &t.coeffs)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = v;
        Ok(())
    })
}

/// Precomputes the angle grid and basis matrix for batches of `l`
/// coefficients in `basis` (a [`ShapevecBasis`] value) decoded at
/// `points` angles.
#[no_mangle]
pub unsafe extern "C" fn shapevec_decoder_new(
    basis: u32,
    l: usize,
    points: usize,
    out: *mut *mut ShapevecDecoder,
) -> ShapevecStatus {
    guard(|| {
        let basis = basis_arg(basis)?;
        let inner = BatchDecoder::new(basis, l, points)?;
        out_handle(
            out,
            ShapevecDecoder {
                inner,
                basis,
                l,
                points,
            },
        )
    })
}

/// Decodes `bs` shapes. `coeffs` is `bs × l` row-major, `centers` is
/// `bs × 2` (x, y), `scales` is `bs` values or null for all 1, and `out`
/// receives `bs × 2 × points` values.
#[no_mangle]
pub unsafe extern "C" fn shapevec_decoder_decode(
    decoder: *const ShapevecDecoder,
    bs: usize,
    coeffs: *const f64,
    centers: *const f64,
    scales: *const f64,
    out: *mut f64,
    out_len: usize,
) -> ShapevecStatus {
    guard(|| {
        let d = as_ref(decoder, "decoder")?;
        if bs == 0 {
            return Err(invalid("empty batch"));
        }
        let need = bs * 2 * d.points;
        if out_len != need {
            return Err(invalid(format!("buffer holds {out_len} values, need {need}")));
        }
        let coeffs = DMatrix::from_row_slice(bs, d.l, slice(coeffs, bs * d.l, "coeffs")?);
        let centers = slice(centers, 2 * bs, "centers")?
            .chunks_exact(2)
            .map(|c| Point2::new(c[0], c[1]))
            .collect();
        let scales = if scales.is_null() {
            vec![1.0; bs]
        } else {
            slice(scales, bs, "scales")?.to_vec()
        };
        let mut batch = DecodeBatch::new(d.basis, coeffs, centers, scales, d.points)?;
        d.inner.decode(&mut batch)?;
        let decoded = batch.output.expect("decoded batch has output");
        slice_mut(out, out_len, "out")?.copy_from_slice(&decoded);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn shapevec_decoder_free(decoder: *mut ShapevecDecoder) {
    if !decoder.is_null() {
        drop(Box::from_raw(decoder));
    }
}
