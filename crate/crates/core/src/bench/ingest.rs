//! COCO-style polygon annotations → mask corpus.

use std::path::Path;

use serde::Deserialize;
use serde_json::Value;

use super::{CorpusSource, ShapeCorpus};
use crate::error::{Result, ShapeError};
use crate::geometry::{rasterize, BinaryMask, Contour, Point2};

/// Margin in pixels around each object's bounding box.
pub const MARGIN: f64 = 2.0;

#[derive(Deserialize)]
struct AnnotationFile {
    annotations: Vec<Annotation>,
}

#[derive(Deserialize)]
struct Annotation {
    id: Value,
    segmentation: Value,
}

/// Corpus plus counts of what had to be skipped.
#[derive(Debug, Clone)]
pub struct Ingested {
    pub corpus: ShapeCorpus,
    pub skipped_polygons: usize,
    pub skipped_objects: usize,
}

pub fn ingest_polygons(path: impl AsRef<Path>) -> Result<Ingested> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| ShapeError::io(path, e))?;
    ingest_polygons_str(&text, &path.display().to_string())
}

/// Rasterizes every polygon annotation into its own tight frame (bounding
/// box plus [`MARGIN`]); the parts of a multi-polygon object are merged
/// into one mask. Polygons with fewer than 3 points or zero area are
/// skipped and counted, as are objects left with nothing to draw
/// (including RLE-encoded segmentations).
pub fn ingest_polygons_str(text: &str, name: &str) -> Result<Ingested> {
    let file: AnnotationFile = serde_json::from_str(text).map_err(|e| ShapeError::Parse {
        context: name.to_string(),
        message: e.to_string(),
    })?;
    let mut shapes = Vec::new();
    let (mut skipped_polygons, mut skipped_objects) = (0, 0);
    for (k, ann) in file.annotations.iter().enumerate() {
        let id = match &ann.id {
            Value::String(s) => s.clone(),
            Value::Number(n) => n.to_string(),
            other => {
                return Err(ShapeError::Parse {
                    context: format!("{name}: annotations[{k}].id"),
                    message: format!("expected number or string, found {other}"),
                })
            }
        };
        let parts = match &ann.segmentation {
            Value::Array(parts) => parts
                .iter()
                .enumerate()
                .map(|(p, part)| {
                    serde_json::from_value::<Vec<f64>>(part.clone()).map_err(|e| ShapeError::Parse {
                        context: format!("{name}: annotations[{k}].segmentation[{p}]"),
                        message: e.to_string(),
                    })
                })
                .collect::<Result<Vec<_>>>()?,
            // RLE or other encodings carry no polygon
            _ => Vec::new(),
        };
        let mut contours = Vec::new();
        for flat in &parts {
            match polygon(flat) {
                Some(c) => contours.push(c),
                None => skipped_polygons += 1,
            }
        }
        match object_mask(&contours)? {
            Some(mask) => shapes.push((id, mask)),
            None => skipped_objects += 1,
        }
    }
    if skipped_polygons + skipped_objects > 0 {
        log::warn!("{name}: skipped {skipped_polygons} polygons and {skipped_objects} objects");
    }
    let corpus = ShapeCorpus::new(shapes, CorpusSource::Annotations(name.to_string()))?;
    Ok(Ingested {
        corpus,
        skipped_polygons,
        skipped_objects,
    })
}

fn polygon(flat: &[f64]) -> Option<Contour> {
    if !flat.len().is_multiple_of(2) || flat.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let mut pts: Vec<Point2> = flat.chunks_exact(2).map(|c| Point2::new(c[0], c[1])).collect();
    pts.dedup();
    while pts.len() > 1 && pts.first() == pts.last() {
        pts.pop();
    }
    let c = Contour::new(pts).ok()?;
    (c.signed_area().abs() > 0.0).then_some(c)
}

fn object_mask(contours: &[Contour]) -> Result<Option<BinaryMask>> {
    let verts = contours.iter().flat_map(|c| c.vertices());
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in verts {
        x0 = x0.min(p.x);
        y0 = y0.min(p.y);
        x1 = x1.max(p.x);
        y1 = y1.max(p.y);
    }
    if contours.is_empty() {
        return Ok(None);
    }
    let (ox, oy) = (x0.floor() - MARGIN, y0.floor() - MARGIN);
    let w = (x1.ceil() - x0.floor() + 2.0 * MARGIN) as usize;
    let h = (y1.ceil() - y0.floor() + 2.0 * MARGIN) as usize;
    let mut mask = BinaryMask::zeros(w, h);
    for c in contours {
        let r = rasterize(&c.translated(-ox, -oy), w, h)?;
        mask = mask.union(&r.mask)?;
    }
    Ok((!mask.is_empty()).then_some(mask))
}
