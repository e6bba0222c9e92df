//! Reconstruction error `E_recon = 1 − mIoU` across signatures, bases and
//! vector lengths.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::csvfmt::real;
use super::ShapeCorpus;
use crate::approx::{evaluate, BasisKind, Fitter};
use crate::codec::{decode_one, ShapeVector};
use crate::error::{Result, ShapeError};
use crate::geometry::{iou, rasterize, BinaryMask, Contour, Point2};
use crate::signature::{
    complete_disconnected, reconstruct_from_ir, sample_ir_completed, sample_xy, uniform_angles, Completion,
    RadialSignature,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SignatureKind {
    /// Inner-center radius: one real per sample.
    Ir,
    /// Arc-length contour vertices: two reals per sample.
    Xy,
}

impl SignatureKind {
    pub fn name(self) -> &'static str {
        match self {
            SignatureKind::Ir => "ir",
            SignatureKind::Xy => "xy",
        }
    }
}

impl fmt::Display for SignatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SignatureKind {
    type Err = ShapeError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ir" => Ok(SignatureKind::Ir),
            "xy" => Ok(SignatureKind::Xy),
            other => Err(ShapeError::invalid(format!("unknown signature '{other}'"))),
        }
    }
}

/// One table row per `(signature, basis, dim)`.
///
/// With `basis = None` the raw signature is the vector: IR samples `dim`
/// rays and XY samples `dim / 2` contour points, so both vectors hold
/// `dim` reals. With a basis the signature is sampled at `fit_points` and
/// fitted: IR with `dim` coefficients, XY with `dim / 2` per coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub signatures: Vec<SignatureKind>,
    pub bases: Vec<Option<BasisKind>>,
    pub dims: Vec<usize>,
    pub fit_points: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            signatures: vec![SignatureKind::Ir, SignatureKind::Xy],
            bases: vec![None],
            dims: vec![8, 20, 40],
            fit_points: 360,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub signature: SignatureKind,
    pub basis: Option<BasisKind>,
    pub dim: usize,
    /// Signature samples (rays or contour points).
    pub points: usize,
    pub e_recon: f64,
    pub miou: f64,
    /// Shapes that contributed to `miou`.
    pub shapes: usize,
    pub failures: usize,
    pub per_shape: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub const HEADER: &'static str = "signature,basis,dim,points,e_recon,miou,shapes,failures";

    pub fn failures(&self) -> usize {
        self.rows.iter().map(|r| r.failures).sum()
    }

    pub fn row(&self, signature: SignatureKind, basis: Option<BasisKind>, dim: usize) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|r| r.signature == signature && r.basis == basis && r.dim == dim)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(Self::HEADER.split(',')).expect("in-memory write");
        for r in &self.rows {
            w.write_record([
                r.signature.name().to_string(),
                r.basis.map_or("raw", BasisKind::name).to_string(),
                r.dim.to_string(),
                r.points.to_string(),
                real(r.e_recon),
                real(r.miou),
                r.shapes.to_string(),
                r.failures.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii csv")
    }
}

/// Per-shape state shared by every configuration.
struct Prepared {
    mask: BinaryMask,
    completion: Completion,
    center: Point2,
    dense: Option<RadialSignature>,
}

fn prepare(mask: &BinaryMask, fit_points: usize, need_dense: bool) -> Result<Prepared> {
    let completion = complete_disconnected(mask)?;
    let center = completion.inner_center()?;
    let dense = if need_dense {
        Some(sample_ir_completed(&completion, center, TAU / fit_points as f64)?)
    } else {
        None
    };
    Ok(Prepared {
        mask: mask.clone(),
        completion,
        center,
        dense,
    })
}

fn score(contour: &Contour, mask: &BinaryMask) -> Result<f64> {
    iou(&rasterize(contour, mask.width(), mask.height())?.mask, mask)
}

/// Encodes and decodes every shape under each configuration and reports
/// `E_recon` against the original masks at their own resolution.
///
/// Per-shape failures are recorded in the row and excluded from the mean.
pub fn recon_error_sweep(corpus: &ShapeCorpus, config: &SweepConfig) -> Result<SweepTable> {
    if corpus.is_empty() {
        return Err(ShapeError::invalid("empty corpus"));
    }
    if config.dims.is_empty() {
        return Ok(SweepTable::default());
    }
    validate(config)?;
    let need_dense = config.bases.iter().any(Option::is_some) && config.signatures.contains(&SignatureKind::Ir);
    let prepared: Vec<Result<Prepared>> = corpus
        .shapes()
        .par_iter()
        .map(|(_, m)| prepare(m, config.fit_points, need_dense))
        .collect();

    let mut rows = Vec::new();
    for &signature in &config.signatures {
        for &basis in &config.bases {
            for &dim in &config.dims {
                rows.push(run_config(&prepared, signature, basis, dim, config.fit_points)?);
            }
        }
    }
    Ok(SweepTable { rows })
}

fn validate(config: &SweepConfig) -> Result<()> {
    if config.fit_points < 3 {
        return Err(ShapeError::invalid("fit_points must be at least 3"));
    }
    for &dim in &config.dims {
        for &sig in &config.signatures {
            for &basis in &config.bases {
                let per_series = match sig {
                    SignatureKind::Ir => dim,
                    SignatureKind::Xy => {
                        if dim % 2 != 0 {
                            return Err(ShapeError::invalid(format!("xy needs an even dimension, got {dim}")));
                        }
                        dim / 2
                    }
                };
                match basis {
                    None if per_series < 3 => {
                        return Err(ShapeError::invalid(format!(
                            "{sig} dim {dim} gives fewer than 3 samples"
                        )))
                    }
                    None => {}
                    Some(b) => {
                        b.check_len(per_series)?;
                        if per_series > config.fit_points {
                            return Err(ShapeError::TooManyCoefficients {
                                requested: per_series,
                                samples: config.fit_points,
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

fn run_config(
    prepared: &[Result<Prepared>],
    signature: SignatureKind,
    basis: Option<BasisKind>,
    dim: usize,
    fit_points: usize,
) -> Result<SweepRow> {
    let (points, fitter) = match (signature, basis) {
        (SignatureKind::Ir, None) => (dim, None),
        (SignatureKind::Xy, None) => (dim / 2, None),
        (SignatureKind::Ir, Some(b)) => (fit_points, Some(Fitter::new(b, dim, fit_points)?)),
        (SignatureKind::Xy, Some(b)) => (fit_points, Some(Fitter::new(b, dim / 2, fit_points)?)),
    };
    let per_shape: Vec<Option<f64>> = prepared
        .par_iter()
        .map(|p| {
            let p = p.as_ref().ok()?;
            let contour = match (signature, &fitter) {
                (SignatureKind::Ir, None) => sample_ir_completed(&p.completion, p.center, TAU / points as f64)
                    .map(|sig| reconstruct_from_ir(&sig)),
                (SignatureKind::Ir, Some(f)) => {
                    let dense = p.dense.as_ref().expect("dense signature prepared");
                    f.fit(&dense.radii)
                        .and_then(|k| ShapeVector::new(p.center, k, None))
                        .and_then(|sv| decode_one(&sv, points))
                }
                (SignatureKind::Xy, None) => {
                    sample_xy(&p.completion.contour, p.center, points).map(|xy| xy.to_contour())
                }
                (SignatureKind::Xy, Some(f)) => fitted_xy(&p.completion.contour, p.center, f),
            };
            contour.and_then(|c| score(&c, &p.mask)).ok()
        })
        .collect();
    let ok: Vec<f64> = per_shape.iter().flatten().copied().collect();
    let failures = per_shape.len() - ok.len();
    let miou = if ok.is_empty() {
        0.0
    } else {
        ok.iter().sum::<f64>() / ok.len() as f64
    };
    Ok(SweepRow {
        signature,
        basis,
        dim,
        points,
        e_recon: 1.0 - miou,
        miou,
        shapes: ok.len(),
        failures,
        per_shape,
    })
}

fn fitted_xy(contour: &Contour, center: Point2, fitter: &Fitter) -> Result<Contour> {
    let xy = sample_xy(contour, center, fitter.samples())?;
    let xs: Vec<f64> = xy.points.iter().map(|p| p.x).collect();
    let ys: Vec<f64> = xy.points.iter().map(|p| p.y).collect();
    let (kx, ky) = (fitter.fit(&xs)?, fitter.fit(&ys)?);
    let grid = uniform_angles(fitter.samples());
    let verts = evaluate(&kx, &grid)
        .into_iter()
        .zip(evaluate(&ky, &grid))
        .map(|(x, y)| Point2::new(center.x + x, center.y + y))
        .collect();
    Ok(Contour::from_decoded(verts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::{generate_synthetic, GeneratorSpec, ShapeKind};

    #[test]
    fn row_count_is_config_product() {
        let corpus = generate_synthetic(&GeneratorSpec::mixed(32, 32), 6, 1).unwrap();
        let table = recon_error_sweep(&corpus, &SweepConfig::default()).unwrap();
        assert_eq!(table.rows.len(), 6);
        let csv = table.to_csv();
        assert_eq!(csv.lines().count(), 7);
        assert_eq!(csv.lines().next().unwrap(), SweepTable::HEADER);
        let empty = SweepConfig {
            dims: vec![],
            ..SweepConfig::default()
        };
        assert!(recon_error_sweep(&corpus, &empty).unwrap().rows.is_empty());
    }

    #[test]
    fn discs_reconstruct_well() {
        let corpus = generate_synthetic(&GeneratorSpec::only(ShapeKind::Disc, 64, 64), 10, 5).unwrap();
        let config = SweepConfig {
            signatures: vec![SignatureKind::Ir],
            bases: vec![Some(BasisKind::Chebyshev)],
            dims: vec![8],
            fit_points: 360,
        };
        let table = recon_error_sweep(&corpus, &config).unwrap();
        assert_eq!(table.failures(), 0);
        assert!(table.rows[0].e_recon <= 0.05, "{}", table.rows[0].e_recon);
    }

    #[test]
    fn invalid_configs() {
        let corpus = generate_synthetic(&GeneratorSpec::mixed(32, 32), 2, 1).unwrap();
        let odd = SweepConfig {
            dims: vec![9],
            ..SweepConfig::default()
        };
        assert!(recon_error_sweep(&corpus, &odd).is_err());
        let fourier_odd = SweepConfig {
            signatures: vec![SignatureKind::Ir],
            bases: vec![Some(BasisKind::FourierFixed)],
            dims: vec![9],
            fit_points: 360,
        };
        assert!(recon_error_sweep(&corpus, &fourier_odd).is_err());
    }
}
