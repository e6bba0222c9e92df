//! Raster and vector primitives: masks, contours, distance transform,
//! polygon fill and IoU.

mod contour;
mod distance;
pub mod io;
mod mask;
pub mod morph;
mod raster;
mod trace;

pub use contour::{Contour, Point2};
pub use distance::{distance_transform, DistanceField};
pub use mask::BinaryMask;
pub use raster::{iou, rasterize, Raster};
pub use trace::trace_contour;
