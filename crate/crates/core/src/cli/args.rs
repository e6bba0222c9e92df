use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

const LONG_VERSION: &str = concat!(
    env!("CARGO_PKG_VERSION"),
    " (target ",
    env!("SHAPEVEC_BUILD_TARGET"),
    ", profile ",
    env!("SHAPEVEC_BUILD_PROFILE"),
    ")"
);

/// Encode masks as inner-center radius shape vectors, decode them in
/// batches, and run reconstruction / sensitivity / statistics studies.
#[derive(Debug, Parser)]
#[command(name = "shapevec", version, long_version = LONG_VERSION)]
pub struct Cli {
    /// TOML file whose keys mirror the flags.
    #[arg(long, global = true, env = "SHAPEVEC_CONFIG")]
    pub config: Option<PathBuf>,

    /// Worker thread cap for corpus studies (0 = all cores).
    #[arg(long, global = true, env = "SHAPEVEC_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Encode one or more masks (PBM or PNG) into shape vectors.
    Encode(EncodeArgs),
    /// Decode shape vectors into contours or a PBM raster.
    Decode(DecodeArgs),
    /// Reconstruction error table over signatures, bases and dimensions.
    Sweep(SweepArgs),
    /// Per-coefficient noise sensitivity.
    Sensitivity(SensitivityArgs),
    /// Per-coefficient mean, variance and histogram.
    Stats(StatsArgs),
    /// Rasterize COCO-style polygon annotations into a directory of PBMs.
    Ingest(IngestArgs),
}

#[derive(Debug, Args, Default)]
pub struct FitArgs {
    /// cheby | fourier | fourier-fixed | poly
    #[arg(long, env = "SHAPEVEC_BASIS")]
    pub basis: Option<String>,
    /// Shape vector length l.
    #[arg(long, env = "SHAPEVEC_DIM")]
    pub dim: Option<usize>,
    /// Angular step, e.g. `1deg`, `pi/180` or radians.
    #[arg(long, env = "SHAPEVEC_TAU")]
    pub tau: Option<String>,
    /// Divide radii by the bounding-box diagonal before fitting.
    #[arg(long, env = "SHAPEVEC_NORMALIZE")]
    pub normalize: bool,
}

#[derive(Debug, Args, Default)]
pub struct CorpusArgs {
    /// Generate this many synthetic shapes.
    #[arg(long, env = "SHAPEVEC_SYNTHETIC")]
    pub synthetic: Option<usize>,
    /// COCO-style annotation JSON.
    #[arg(long, env = "SHAPEVEC_CORPUS")]
    pub corpus: Option<PathBuf>,
    /// Directory of PBM/PNG masks.
    #[arg(long, env = "SHAPEVEC_MASKS")]
    pub masks: Option<PathBuf>,
    /// Synthetic kinds: mixed | star | hard | comma list.
    #[arg(long, env = "SHAPEVEC_KINDS")]
    pub kinds: Option<String>,
    /// Synthetic raster size WxH.
    #[arg(long, env = "SHAPEVEC_RESOLUTION")]
    pub resolution: Option<String>,
    #[arg(long, env = "SHAPEVEC_SEED")]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[arg(long, env = "SHAPEVEC_MASK", value_delimiter = ',')]
    pub mask: Vec<PathBuf>,
    #[command(flatten)]
    pub fit: FitArgs,
    #[arg(short, long, env = "SHAPEVEC_OUTPUT")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    /// Shape vector JSON or JSON-lines file.
    #[arg(long = "in", env = "SHAPEVEC_IN")]
    pub input: Option<PathBuf>,
    #[arg(long, env = "SHAPEVEC_POINTS")]
    pub points: Option<usize>,
    /// Write a WxH PBM instead of contour JSON.
    #[arg(long, env = "SHAPEVEC_RASTER")]
    pub raster: Option<String>,
    #[arg(short, long, env = "SHAPEVEC_OUTPUT")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// ir,xy
    #[arg(long, env = "SHAPEVEC_SIGNATURES")]
    pub signatures: Option<String>,
    /// raw and/or basis names, comma separated.
    #[arg(long, env = "SHAPEVEC_BASES")]
    pub bases: Option<String>,
    /// Vector dimensions, comma separated.
    #[arg(long, env = "SHAPEVEC_DIMS")]
    pub dims: Option<String>,
    /// Samples per signature when fitting.
    #[arg(long, env = "SHAPEVEC_FIT_POINTS")]
    pub fit_points: Option<usize>,
    #[arg(short, long, env = "SHAPEVEC_OUTPUT")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SensitivityArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[command(flatten)]
    pub fit: FitArgs,
    /// Noise scales, comma separated and increasing.
    #[arg(long, env = "SHAPEVEC_ALPHAS")]
    pub alphas: Option<String>,
    #[arg(long, env = "SHAPEVEC_TRIALS")]
    pub trials: Option<usize>,
    #[arg(short, long, env = "SHAPEVEC_OUTPUT")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[command(flatten)]
    pub fit: FitArgs,
    #[arg(long, env = "SHAPEVEC_BINS")]
    pub bins: Option<usize>,
    #[arg(short, long, env = "SHAPEVEC_OUTPUT")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long, env = "SHAPEVEC_ANNOTATIONS")]
    pub annotations: Option<PathBuf>,
    /// Output directory (created; must be empty if it exists).
    #[arg(short, long, env = "SHAPEVEC_OUTPUT")]
    pub output: Option<PathBuf>,
}
