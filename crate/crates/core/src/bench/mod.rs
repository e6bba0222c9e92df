//! Off-line studies: reconstruction error against vector length, noise
//! sensitivity per coefficient, and coefficient statistics, over synthetic
//! or ingested mask corpora.
//!
//! CSV schemas (one header row, reals written with 17 significant digits):
//!
//! * sweep: `signature,basis,dim,points,e_recon,miou,shapes,failures`
//! * sensitivity: `basis,l,index,mean_coeff,flag,alpha,delta_e_recon`
//! * stats: `basis,index,mean,variance,min,max,histogram` where
//!   `histogram` is `;`-separated bin counts over `[min, max]`.

mod csvfmt;
pub mod ingest;
pub mod sensitivity;
pub mod stats;
pub mod sweep;
pub mod synth;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, ShapeError};
use crate::geometry::BinaryMask;

pub use csvfmt::parse_real;
pub use ingest::{ingest_polygons, ingest_polygons_str, Ingested};
pub use sensitivity::{delta_e_recon, sensitivity_sweep, SensitivityConfig, SensitivityEntry, SensitivityReport};
pub use stats::{coefficient_stats, CoefficientStats, IndexStats};
pub use sweep::{recon_error_sweep, SignatureKind, SweepConfig, SweepRow, SweepTable};
pub use synth::{generate_synthetic, GeneratorSpec, ShapeKind};

/// Where a corpus came from.
#[derive(Debug, Clone, PartialEq)]
pub enum CorpusSource {
    Synthetic { spec: GeneratorSpec, seed: u64 },
    Annotations(String),
    Files(String),
}

/// Labelled masks; every mask is nonempty and ids are unique.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeCorpus {
    shapes: Vec<(String, BinaryMask)>,
    pub source: CorpusSource,
}

impl ShapeCorpus {
    pub fn new(shapes: Vec<(String, BinaryMask)>, source: CorpusSource) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for (id, mask) in &shapes {
            if mask.is_empty() {
                return Err(ShapeError::invalid(format!("shape '{id}' is empty")));
            }
            if !seen.insert(id.as_str()) {
                return Err(ShapeError::invalid(format!("duplicate shape id '{id}'")));
            }
        }
        Ok(Self { shapes, source })
    }

    pub fn len(&self) -> usize {
        self.shapes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shapes.is_empty()
    }

    pub fn shapes(&self) -> &[(String, BinaryMask)] {
        &self.shapes
    }

    pub fn masks(&self) -> impl Iterator<Item = &BinaryMask> {
        self.shapes.iter().map(|(_, m)| m)
    }

    /// The same shapes in a different order.
    pub fn permuted(&self, order: &[usize]) -> Result<ShapeCorpus> {
        let shapes = order
            .iter()
            .map(|&i| {
                self.shapes
                    .get(i)
                    .cloned()
                    .ok_or_else(|| ShapeError::invalid("index out of range"))
            })
            .collect::<Result<Vec<_>>>()?;
        ShapeCorpus::new(shapes, self.source.clone())
    }

    /// Loads every `.pbm`/`.png` file in `dir`, sorted by file name.
    pub fn from_dir(dir: impl AsRef<std::path::Path>) -> Result<ShapeCorpus> {
        let dir = dir.as_ref();
        let mut paths: Vec<_> = std::fs::read_dir(dir)
            .map_err(|e| ShapeError::io(dir, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| matches!(p.extension().and_then(|s| s.to_str()), Some("pbm" | "png")))
            .collect();
        paths.sort();
        let shapes = paths
            .iter()
            .map(|p| {
                let id = p.file_stem().and_then(|s| s.to_str()).unwrap_or("shape").to_string();
                crate::geometry::io::read_mask(p).map(|m| (id, m))
            })
            .collect::<Result<Vec<_>>>()?;
        ShapeCorpus::new(shapes, CorpusSource::Files(dir.display().to_string()))
    }
}

/// Independent RNG stream `stream` of the master `seed`.
pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Runs `f` on a pool capped at `threads` workers (0 = rayon default).
pub fn with_threads<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> Result<R> {
    if threads == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| ShapeError::invalid(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}
