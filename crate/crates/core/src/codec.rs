//! Mask → shape vector encoding and batched tensor decoding.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::approx::{basis_matrix, evaluate, BasisKind, CoefficientVector, Fitter};
use crate::error::{Result, ShapeError};
use crate::geometry::{BinaryMask, Contour, Point2};
use crate::signature::{
    angle_count, complete_disconnected, reconstruct_from_ir, sample_ir_completed, uniform_angles, RadialSignature,
};

/// Per-object regression target: inner center plus fitted coefficients.
///
/// When `scale` is present the coefficients describe radii divided by it
/// (the foreground bounding-box diagonal) and decoding multiplies back.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawShapeVector")]
pub struct ShapeVector {
    pub center: Point2,
    #[serde(flatten)]
    pub coeffs: CoefficientVector,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
}

#[derive(Deserialize)]
struct RawShapeVector {
    center: Point2,
    #[serde(flatten)]
    coeffs: CoefficientVector,
    #[serde(default)]
    scale: Option<f64>,
}

impl TryFrom<RawShapeVector> for ShapeVector {
    type Error = ShapeError;

    fn try_from(raw: RawShapeVector) -> Result<Self> {
        ShapeVector::new(raw.center, raw.coeffs, raw.scale)
    }
}

impl ShapeVector {
    pub fn new(center: Point2, coeffs: CoefficientVector, scale: Option<f64>) -> Result<Self> {
        if !center.is_finite() {
            return Err(ShapeError::invalid("center is not finite"));
        }
        if let Some(s) = scale {
            if !(s.is_finite() && s > 0.0) {
                return Err(ShapeError::invalid(format!("scale must be positive, got {s}")));
            }
        }
        Ok(Self { center, coeffs, scale })
    }

    pub fn scale_factor(&self) -> f64 {
        self.scale.unwrap_or(1.0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("shape vector serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| ShapeError::Parse {
            context: "shape vector JSON".into(),
            message: e.to_string(),
        })
    }

    /// Parses JSON-lines, one shape vector per non-blank line.
    pub fn read_json_lines(text: &str) -> Result<Vec<ShapeVector>> {
        text.lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, line)| {
                serde_json::from_str(line).map_err(|e| ShapeError::Parse {
                    context: format!("shape vector on line {}", i + 1),
                    message: e.to_string(),
                })
            })
            .collect()
    }

    pub fn write_json_lines(vectors: &[ShapeVector]) -> String {
        vectors.iter().map(|v| v.to_json() + "\n").collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EncodeOptions {
    pub basis: BasisKind,
    pub l: usize,
    pub tau: f64,
    /// Divide radii by the foreground bounding-box diagonal before fitting.
    pub normalize: bool,
}

impl Default for EncodeOptions {
    fn default() -> Self {
        Self {
            basis: BasisKind::Chebyshev,
            l: 20,
            tau: PI / 180.0,
            normalize: false,
        }
    }
}

/// Reusable encoder; holds the factored design matrix for its
/// configuration.
pub struct Encoder {
    options: EncodeOptions,
    fitter: Fitter,
}

impl Encoder {
    pub fn new(options: EncodeOptions) -> Result<Self> {
        let n = angle_count(options.tau)?;
        let fitter = Fitter::new(options.basis, options.l, n)?;
        Ok(Self { options, fitter })
    }

    pub fn options(&self) -> &EncodeOptions {
        &self.options
    }

    /// Completes, centers, samples and fits; also returns the raw signature.
    pub fn encode_with_signature(&self, mask: &BinaryMask) -> Result<(ShapeVector, RadialSignature)> {
        let completion = complete_disconnected(mask)?;
        let center = completion.inner_center()?;
        let sig = sample_ir_completed(&completion, center, self.options.tau)?;
        let scale = if self.options.normalize {
            let (x0, y0, x1, y1) = mask.bounding_box().ok_or(ShapeError::EmptyShape)?;
            Some(((x1 - x0 + 1) as f64).hypot((y1 - y0 + 1) as f64))
        } else {
            None
        };
        let coeffs = match scale {
            Some(s) => {
                let scaled: Vec<f64> = sig.radii.iter().map(|r| r / s).collect();
                self.fitter.fit(&scaled)?
            }
            None => self.fitter.fit(&sig.radii)?,
        };
        Ok((ShapeVector::new(center, coeffs, scale)?, sig))
    }

    pub fn encode(&self, mask: &BinaryMask) -> Result<ShapeVector> {
        self.encode_with_signature(mask).map(|(sv, _)| sv)
    }
}

/// Encodes a mask into a shape vector with `l` coefficients of `basis`,
/// sampling the IR signature every `tau` radians.
pub fn encode(mask: &BinaryMask, basis: BasisKind, l: usize, tau: f64) -> Result<ShapeVector> {
    Encoder::new(EncodeOptions {
        basis,
        l,
        tau,
        normalize: false,
    })?
    .encode(mask)
}

/// Radii of a shape vector on the `n`-point uniform grid, clamped at 0.
pub fn decoded_radii(sv: &ShapeVector, n_points: usize) -> Vec<f64> {
    let scale = sv.scale_factor();
    evaluate(&sv.coeffs, &uniform_angles(n_points))
        .into_iter()
        .map(|r| (r * scale).max(0.0))
        .collect()
}

/// Polygon `p_c + f(θ_j)·(cos θ_j, sin θ_j)` at `n_points` uniform angles.
pub fn decode_one(sv: &ShapeVector, n_points: usize) -> Result<Contour> {
    if n_points < 3 {
        return Err(ShapeError::invalid(format!("need at least 3 points, got {n_points}")));
    }
    let sig = RadialSignature::new(sv.center, 2.0 * PI / n_points as f64, decoded_radii(sv, n_points))?;
    Ok(reconstruct_from_ir(&sig))
}

/// A batch of shape vectors laid out as dense tensors.
///
/// `coeffs` is `bs × l`, `centers` is `bs` points broadcast over the angle
/// grid, and once decoded `output` holds `bs × 2 × N` coordinates with
/// index `(b·2 + axis)·N + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeBatch {
    pub basis: BasisKind,
    pub coeffs: DMatrix<f64>,
    pub centers: Vec<Point2>,
    pub scales: Vec<f64>,
    pub output: Option<Vec<f64>>,
    points: usize,
}

impl DecodeBatch {
    pub fn new(
        basis: BasisKind,
        coeffs: DMatrix<f64>,
        centers: Vec<Point2>,
        scales: Vec<f64>,
        points: usize,
    ) -> Result<Self> {
        basis.check_len(coeffs.ncols())?;
        if coeffs.nrows() != centers.len() || centers.len() != scales.len() {
            return Err(ShapeError::DimensionMismatch(format!(
                "{} coefficient rows, {} centers, {} scales",
                coeffs.nrows(),
                centers.len(),
                scales.len()
            )));
        }
        if points < 3 {
            return Err(ShapeError::invalid(format!("need at least 3 points, got {points}")));
        }
        Ok(Self {
            basis,
            coeffs,
            centers,
            scales,
            output: None,
            points,
        })
    }

    pub fn from_shape_vectors(vectors: &[ShapeVector], points: usize) -> Result<Self> {
        let first = vectors.first().ok_or_else(|| ShapeError::invalid("empty batch"))?;
        let (basis, l) = (first.coeffs.basis, first.coeffs.len());
        let mut coeffs = DMatrix::zeros(vectors.len(), l);
        for (b, sv) in vectors.iter().enumerate() {
            if sv.coeffs.basis != basis || sv.coeffs.len() != l {
                return Err(ShapeError::DimensionMismatch(format!(
                    "shape {b} is {} with {} coefficients, batch is {basis} with {l}",
                    sv.coeffs.basis,
                    sv.coeffs.len()
                )));
            }
            coeffs.row_mut(b).copy_from_slice(&sv.coeffs.coeffs);
        }
        let centers = vectors.iter().map(|sv| sv.center).collect();
        let scales = vectors.iter().map(|sv| sv.scale_factor()).collect();
        DecodeBatch::new(basis, coeffs, centers, scales, points)
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn points(&self) -> usize {
        self.points
    }

    /// Decoded vertex `j` of shape `b`.
    pub fn point(&self, b: usize, j: usize) -> Option<Point2> {
        let out = self.output.as_ref()?;
        let n = self.points;
        Some(Point2::new(out[(2 * b) * n + j], out[(2 * b + 1) * n + j]))
    }

    pub fn contour(&self, b: usize) -> Option<Contour> {
        let vertices = (0..self.points).map(|j| self.point(b, j)).collect::<Option<Vec<_>>>()?;
        Some(Contour::from_decoded(vertices))
    }
}

/// Decoder for a fixed angle grid, basis and coefficient count.
///
/// The `m × N` basis matrix `T(Θ)` and the direction vectors `u(Θ)` are
/// computed once; decoding a batch is one matrix product followed by a
/// clamp and an elementwise multiply-add. Vectors with a free Fourier
/// frequency carry their own `ω`, so their basis is built per batch.
pub struct BatchDecoder {
    basis: BasisKind,
    l: usize,
    thetas: Vec<f64>,
    cos: Vec<f64>,
    sin: Vec<f64>,
    shared: Option<DMatrix<f64>>,
}

impl BatchDecoder {
    pub fn new(basis: BasisKind, l: usize, points: usize) -> Result<Self> {
        basis.check_len(l)?;
        if points < 3 {
            return Err(ShapeError::invalid(format!("need at least 3 points, got {points}")));
        }
        let thetas = uniform_angles(points);
        let (sin, cos) = thetas.iter().map(|t| t.sin_cos()).unzip();
        let shared = match basis {
            BasisKind::FourierFree => None,
            _ => Some(basis_matrix(basis, basis.weight_count(l), 1.0, &thetas)),
        };
        Ok(Self {
            basis,
            l,
            thetas,
            cos,
            sin,
            shared,
        })
    }

    pub fn points(&self) -> usize {
        self.thetas.len()
    }

    pub fn decode(&self, batch: &mut DecodeBatch) -> Result<()> {
        if batch.basis != self.basis || batch.coeffs.ncols() != self.l || batch.points != self.thetas.len() {
            return Err(ShapeError::DimensionMismatch(format!(
                "batch is {} × {} at {} points, decoder is {} × {} at {} points",
                batch.basis,
                batch.coeffs.ncols(),
                batch.points,
                self.basis,
                self.l,
                self.thetas.len()
            )));
        }
        let n = self.thetas.len();
        let bs = batch.len();
        let weights = if self.basis.is_fourier() {
            batch.coeffs.columns(1, self.l - 1).into_owned()
        } else {
            batch.coeffs.clone()
        };
        // bs × N radii
        let mut radii = match &self.shared {
            Some(t) => &weights * t,
            None => self.free_frequency_radii(&batch.coeffs, &weights),
        };
        for b in 0..bs {
            let s = batch.scales[b];
            for j in 0..n {
                radii[(b, j)] = (radii[(b, j)] * s).max(0.0);
            }
        }
        let mut out = vec![0.0; bs * 2 * n];
        for b in 0..bs {
            let c = batch.centers[b];
            let (xs, rest) = out[2 * b * n..(2 * b + 2) * n].split_at_mut(n);
            for j in 0..n {
                let r = radii[(b, j)];
                xs[j] = c.x + r * self.cos[j];
                rest[j] = c.y + r * self.sin[j];
            }
        }
        batch.output = Some(out);
        Ok(())
    }

    fn free_frequency_radii(&self, coeffs: &DMatrix<f64>, weights: &DMatrix<f64>) -> DMatrix<f64> {
        let bs = coeffs.nrows();
        let n = self.thetas.len();
        let harmonics = (self.l - 2) / 2;
        let mut radii = DMatrix::zeros(bs, n);
        for b in 0..bs {
            let omega = coeffs[(b, 0)];
            for j in 0..n {
                let mut acc = 0.5 * weights[(b, 0)];
                for i in 1..=harmonics {
                    let (s, c) = (i as f64 * omega * self.thetas[j]).sin_cos();
                    acc += weights[(b, i)] * c + weights[(b, harmonics + i)] * s;
                }
                radii[(b, j)] = acc;
            }
        }
        radii
    }
}

/// Decodes every shape of `batch` on its angle grid.
pub fn decode_batch(mut batch: DecodeBatch) -> Result<DecodeBatch> {
    let decoder = BatchDecoder::new(batch.basis, batch.coeffs.ncols(), batch.points)?;
    decoder.decode(&mut batch)?;
    Ok(batch)
}

/// Squared L2 norm of the concatenated center and coefficient residuals.
pub fn shape_loss(
    pred_center: Point2,
    pred_coeffs: &CoefficientVector,
    gt_center: Point2,
    gt_coeffs: &CoefficientVector,
) -> Result<f64> {
    if pred_coeffs.basis != gt_coeffs.basis || pred_coeffs.len() != gt_coeffs.len() {
        return Err(ShapeError::DimensionMismatch(format!(
            "predicted {} × {} vs target {} × {}",
            pred_coeffs.basis,
            pred_coeffs.len(),
            gt_coeffs.basis,
            gt_coeffs.len()
        )));
    }
    let dc = pred_center - gt_center;
    let dk: f64 = pred_coeffs
        .coeffs
        .iter()
        .zip(&gt_coeffs.coeffs)
        .map(|(p, g)| (p - g) * (p - g))
        .sum();
    Ok(dc.x * dc.x + dc.y * dc.y + dk)
}
