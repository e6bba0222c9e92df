use super::{BinaryMask, Contour};
use crate::error::{Result, ShapeError};

/// Output of [`rasterize`]: the filled mask and whether the polygon had
/// zero area (in which case the mask is all background).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    pub mask: BinaryMask,
    pub degenerate: bool,
}

/// Even-odd scanline fill sampled at pixel centers.
///
/// Pixel `(i, j)` is set iff `(i + 0.5, j + 0.5)` is inside the polygon.
/// An edge counts for a scanline when the scanline lies in the half-open
/// span `[y_min, y_max)` of the edge; within a span `[x_in, x_out)` a center
/// exactly on the entering edge is inside and one on the leaving edge is
/// outside.
pub fn rasterize(contour: &Contour, width: usize, height: usize) -> Result<Raster> {
    if width == 0 || height == 0 {
        return Err(ShapeError::invalid(format!(
            "raster dimensions must be positive, got {width}x{height}"
        )));
    }
    let mut mask = BinaryMask::zeros(width, height);
    if contour.signed_area().abs() <= f64::EPSILON {
        return Ok(Raster { mask, degenerate: true });
    }

    let mut crossings: Vec<f64> = Vec::with_capacity(16);
    for j in 0..height {
        let yc = j as f64 + 0.5;
        crossings.clear();
        for (a, b) in contour.edges() {
            let (lo, hi) = if a.y <= b.y { (a, b) } else { (b, a) };
            if lo.y <= yc && yc < hi.y {
                let t = (yc - lo.y) / (hi.y - lo.y);
                crossings.push(lo.x + t * (hi.x - lo.x));
            }
        }
        crossings.sort_by(f64::total_cmp);
        for span in crossings.chunks_exact(2) {
            let (x_in, x_out) = (span[0], span[1]);
            // centers i + 0.5 with x_in <= i + 0.5 < x_out
            let first = (x_in - 0.5).ceil().max(0.0);
            let last = (x_out - 0.5).ceil() - 1.0;
            if last < first {
                continue;
            }
            let last = last.min(width as f64 - 1.0);
            let mut i = first as usize;
            while (i as f64) <= last {
                mask.set(i, j, true);
                i += 1;
            }
        }
    }
    Ok(Raster {
        mask,
        degenerate: false,
    })
}

/// Intersection over union of two equally sized masks; 1.0 when both are
/// empty.
pub fn iou(a: &BinaryMask, b: &BinaryMask) -> Result<f64> {
    if !a.same_shape(b) {
        return Err(ShapeError::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            a.width(),
            a.height(),
            b.width(),
            b.height()
        )));
    }
    let (mut inter, mut union) = (0usize, 0usize);
    for (&p, &q) in a.bits().iter().zip(b.bits()) {
        inter += (p && q) as usize;
        union += (p || q) as usize;
    }
    if union == 0 {
        return Ok(1.0);
    }
    Ok(inter as f64 / union as f64)
}
