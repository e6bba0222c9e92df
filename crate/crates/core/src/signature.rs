//! Inner-center radius (IR) signatures and arc-length XY signatures.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Result, ShapeError};
use crate::geometry::morph::{component_count, dilate};
use crate::geometry::{distance_transform, trace_contour, BinaryMask, Contour, Point2};

/// Ray-march step in pixels.
pub const MARCH_STEP: f64 = 0.25;
const BISECT_ITERS: usize = 40;

/// Radius of the farthest boundary crossing at each of `N` uniform angles
/// `θ_j = j·τ` around an inner center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialSignature {
    pub center: Point2,
    pub tau: f64,
    pub radii: Vec<f64>,
}

impl RadialSignature {
    pub fn new(center: Point2, tau: f64, radii: Vec<f64>) -> Result<Self> {
        let n = angle_count(tau)?;
        if radii.len() != n {
            return Err(ShapeError::DimensionMismatch(format!(
                "{} radii for tau giving {n} angles",
                radii.len()
            )));
        }
        if let Some(i) = radii.iter().position(|r| !(r.is_finite() && *r >= 0.0)) {
            return Err(ShapeError::invalid(format!("radius {i} is negative or not finite")));
        }
        if !center.is_finite() {
            return Err(ShapeError::invalid("center is not finite"));
        }
        Ok(Self { center, tau, radii })
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn thetas(&self) -> Vec<f64> {
        uniform_angles(self.radii.len())
    }

    pub fn max_radius(&self) -> f64 {
        self.radii.iter().copied().fold(0.0, f64::max)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RadialSignature = serde_json::from_str(text).map_err(|e| ShapeError::Parse {
            context: "radial signature JSON".into(),
            message: e.to_string(),
        })?;
        RadialSignature::new(raw.center, raw.tau, raw.radii)
    }
}

/// `N = round(2π/τ)`, requiring `τ` to divide the full turn to within 1e-9.
pub fn angle_count(tau: f64) -> Result<usize> {
    if !(tau.is_finite() && tau > 0.0) {
        return Err(ShapeError::invalid(format!("tau must be positive, got {tau}")));
    }
    let n = (TAU / tau).round();
    if n < 3.0 || (n * tau - TAU).abs() > 1e-9 {
        return Err(ShapeError::invalid(format!(
            "tau = {tau} does not divide 2π into at least 3 equal steps"
        )));
    }
    Ok(n as usize)
}

/// Angles `j·2π/n` for `j = 0..n`.
pub fn uniform_angles(n: usize) -> Vec<f64> {
    let step = TAU / n as f64;
    (0..n).map(|j| j as f64 * step).collect()
}

/// Contour vertices sampled uniformly by arc length, relative to `center`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XYSignature {
    pub center: Point2,
    pub points: Vec<Point2>,
}

impl XYSignature {
    /// Absolute polygon `center + points`.
    pub fn to_contour(&self) -> Contour {
        Contour::from_decoded(self.points.iter().map(|&p| p + self.center).collect())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Center of the foreground pixel farthest from the background.
pub fn inner_center(mask: &BinaryMask) -> Result<Point2> {
    let df = distance_transform(mask)?;
    let (x, y, _) = df.argmax();
    Ok(Point2::new(x as f64 + 0.5, y as f64 + 0.5))
}

/// Result of [`complete_disconnected`].
#[derive(Debug, Clone)]
pub struct Completion {
    /// The input mask, untouched; radii are sampled from it.
    pub mask: BinaryMask,
    /// Single-component mask the inner center is computed on. Equal to
    /// `mask` when the input was already connected.
    pub dilated: BinaryMask,
    /// Outer contour of `dilated`, giving the cyclic point ordering.
    pub contour: Contour,
    /// Dilation rounds applied.
    pub rounds: usize,
}

impl Completion {
    pub fn is_connected(&self) -> bool {
        self.rounds == 0
    }

    pub fn inner_center(&self) -> Result<Point2> {
        inner_center(&self.dilated)
    }
}

/// Joins disconnected regions by repeated 3×3 dilation.
pub fn complete_disconnected(mask: &BinaryMask) -> Result<Completion> {
    if mask.is_empty() {
        return Err(ShapeError::EmptyShape);
    }
    let mut dilated = mask.clone();
    let mut rounds = 0;
    while component_count(&dilated) > 1 {
        dilated = dilate(&dilated);
        rounds += 1;
    }
    let mut contours = trace_contour(&dilated)?;
    debug_assert_eq!(contours.len(), 1);
    Ok(Completion {
        mask: mask.clone(),
        dilated,
        contour: contours.swap_remove(0),
        rounds,
    })
}

/// Samples the IR signature: for each `θ_j = j·τ` the distance from
/// `center` to the last foreground→background transition along the ray.
///
/// Rays are marched at [`MARCH_STEP`] and the final transition is refined
/// by bisection.
pub fn sample_ir(mask: &BinaryMask, center: Point2, tau: f64) -> Result<RadialSignature> {
    if !mask.contains_point(center.x, center.y) {
        return Err(ShapeError::CenterOutside {
            x: center.x,
            y: center.y,
        });
    }
    let n = angle_count(tau)?;
    let radii = march_radii(mask, center, n);
    if let Some(j) = radii.iter().position(|r| r.is_nan()) {
        return Err(ShapeError::Degenerate(format!("ray {j} found no boundary")));
    }
    RadialSignature::new(center, tau, radii)
}

/// IR sampling for a completed (possibly disconnected) mask: the center
/// must lie in the dilated mask, radii come from the original one, and a
/// ray that meets no foreground gets radius 0.
pub fn sample_ir_completed(completion: &Completion, center: Point2, tau: f64) -> Result<RadialSignature> {
    if completion.is_connected() {
        return sample_ir(&completion.mask, center, tau);
    }
    if !completion.dilated.contains_point(center.x, center.y) {
        return Err(ShapeError::CenterOutside {
            x: center.x,
            y: center.y,
        });
    }
    let n = angle_count(tau)?;
    let radii = march_radii(&completion.mask, center, n)
        .into_iter()
        .map(|r| if r.is_nan() { 0.0 } else { r })
        .collect();
    RadialSignature::new(center, tau, radii)
}

/// NaN marks a ray without any foreground→background transition.
fn march_radii(mask: &BinaryMask, center: Point2, n: usize) -> Vec<f64> {
    let reach = (mask.width() as f64).hypot(mask.height() as f64) + 2.0;
    let steps = (reach / MARCH_STEP).ceil() as usize;
    uniform_angles(n)
        .into_iter()
        .map(|theta| {
            let (dy, dx) = theta.sin_cos();
            let at = |t: f64| mask.contains_point(center.x + t * dx, center.y + t * dy);
            let mut prev = at(0.0);
            let mut last = None;
            for k in 1..=steps {
                let t = k as f64 * MARCH_STEP;
                let cur = at(t);
                if prev && !cur {
                    last = Some(t);
                }
                prev = cur;
            }
            match last {
                None => f64::NAN,
                Some(t_out) => {
                    let (mut lo, mut hi) = (t_out - MARCH_STEP, t_out);
                    for _ in 0..BISECT_ITERS {
                        let mid = 0.5 * (lo + hi);
                        if at(mid) {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    0.5 * (lo + hi)
                }
            }
        })
        .collect()
}

/// Resamples a contour at `n` points equally spaced in arc length.
///
/// The walk starts at the vertex with the smallest polar angle in `[0, 2π)`
/// about `center` (first such vertex on ties) and follows the contour's
/// own orientation.
pub fn sample_xy(contour: &Contour, center: Point2, n: usize) -> Result<XYSignature> {
    if n < 3 {
        return Err(ShapeError::invalid(format!("XY signature needs n >= 3, got {n}")));
    }
    let perimeter = contour.perimeter();
    if perimeter.is_nan() || perimeter <= 0.0 {
        return Err(ShapeError::Degenerate("contour has zero perimeter".into()));
    }
    let verts = contour.vertices();
    let polar = |p: &Point2| (p.y - center.y).atan2(p.x - center.x).rem_euclid(TAU);
    let start = (0..verts.len())
        .min_by(|&a, &b| polar(&verts[a]).total_cmp(&polar(&verts[b])))
        .expect("contour has vertices");
    let m = verts.len();
    let ring: Vec<Point2> = (0..=m).map(|i| verts[(start + i) % m]).collect();

    let spacing = perimeter / n as f64;
    let mut points = Vec::with_capacity(n);
    let mut seg = 0usize;
    let mut seg_start = 0.0;
    let mut seg_len = ring[0].distance(&ring[1]);
    for k in 0..n {
        let s = k as f64 * spacing;
        while s > seg_start + seg_len && seg + 2 < ring.len() {
            seg_start += seg_len;
            seg += 1;
            seg_len = ring[seg].distance(&ring[seg + 1]);
        }
        let t = if seg_len > 0.0 {
            ((s - seg_start) / seg_len).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let (a, b) = (ring[seg], ring[seg + 1]);
        let p = Point2::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y));
        points.push(p - center);
    }
    Ok(XYSignature { center, points })
}

/// Polygon `center + r_j·(cos θ_j, sin θ_j)`.
pub fn reconstruct_from_ir(sig: &RadialSignature) -> Contour {
    polar_polygon(sig.center, &sig.radii)
}

pub(crate) fn polar_polygon(center: Point2, radii: &[f64]) -> Contour {
    let vertices = uniform_angles(radii.len())
        .into_iter()
        .zip(radii)
        .map(|(theta, &r)| {
            let (s, c) = theta.sin_cos();
            Point2::new(center.x + r * c, center.y + r * s)
        })
        .collect();
    Contour::from_decoded(vertices)
}
