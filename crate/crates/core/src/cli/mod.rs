//! Command-line front end.
//!
//! Every flag can also come from an environment variable `SHAPEVEC_<FLAG>`
//! (upper case, dashes as underscores) or from a TOML file given with
//! `--config` whose keys are the flag names. Precedence is command line,
//! then environment, then config file, then built-in defaults.

mod args;
mod output;
mod settings;

use std::ffi::OsString;

use clap::Parser;
use serde_json::json;

use crate::bench::{self, coefficient_stats, recon_error_sweep, sensitivity_sweep};
use crate::codec::{decode_one, BatchDecoder, DecodeBatch, EncodeOptions, Encoder, ShapeVector};
use crate::error::ShapeError;
use crate::geometry::io::{encode_pbm, read_mask};
use crate::geometry::{rasterize, BinaryMask, Contour};

pub use args::Cli;
pub use settings::{CorpusSpec, RunConfig, Task};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DATA: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(ShapeError),
}

impl From<ShapeError> for CliError {
    fn from(e: ShapeError) -> Self {
        CliError::Data(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Data(e) => write!(f, "error: {e}"),
        }
    }
}

/// Parses `argv` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let config = match RunConfig::resolve(&cli) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("usage error: {msg}");
            return EXIT_USAGE;
        }
    };
    match bench::with_threads(config.threads, || execute(&config)) {
        Ok(Ok(summary)) => {
            let failed = summary.get("failures").and_then(|v| v.as_u64()).unwrap_or(0) > 0;
            println!("{summary}");
            if failed {
                EXIT_DATA
            } else {
                EXIT_OK
            }
        }
        Ok(Err(e)) => report(e),
        Err(e) => report(CliError::Data(e)),
    }
}

fn report(e: CliError) -> i32 {
    eprintln!("{e}");
    let status = match e {
        CliError::Usage(_) => EXIT_USAGE,
        CliError::Data(_) => EXIT_DATA,
    };
    println!("{}", json!({"status": "error", "message": e.to_string()}));
    status
}

fn execute(config: &RunConfig) -> Result<serde_json::Value, CliError> {
    match &config.task {
        Task::Encode { masks } => {
            let encoder = Encoder::new(config.encode_options())?;
            let vectors = masks
                .iter()
                .map(|p| read_mask(p).and_then(|m| encoder.encode(&m)))
                .collect::<Result<Vec<_>, _>>()?;
            let body = if vectors.len() == 1 {
                vectors[0].to_json() + "\n"
            } else {
                ShapeVector::write_json_lines(&vectors)
            };
            output::write_atomic(&config.output, body.as_bytes())?;
            Ok(json!({
                "status": "ok", "command": "encode", "output": config.output,
                "shapes": vectors.len(), "basis": config.basis.name(), "dim": config.l,
                "points": config.points,
            }))
        }
        Task::Decode { input, raster } => {
            let text = std::fs::read_to_string(input).map_err(|e| ShapeError::Io {
                path: input.into(),
                source: e,
            })?;
            let vectors = match ShapeVector::from_json(&text) {
                Ok(sv) => vec![sv],
                Err(_) => ShapeVector::read_json_lines(&text)?,
            };
            if vectors.is_empty() {
                return Err(ShapeError::invalid("no shape vectors in input").into());
            }
            let contours = decode_all(&vectors, config.points)?;
            let body = match raster {
                Some((w, h)) => {
                    let mut mask = BinaryMask::zeros(*w, *h);
                    for c in &contours {
                        mask = mask.union(&rasterize(c, *w, *h)?.mask)?;
                    }
                    encode_pbm(&mask)
                }
                None => (serde_json::to_string(&contours).expect("contours serialize") + "\n").into_bytes(),
            };
            output::write_atomic(&config.output, &body)?;
            Ok(json!({
                "status": "ok", "command": "decode", "output": config.output,
                "shapes": contours.len(), "points": config.points,
            }))
        }
        Task::Sweep { corpus, sweep } => {
            let corpus = corpus.load()?;
            let table = recon_error_sweep(&corpus, sweep)?;
            output::write_atomic(&config.output, table.to_csv().as_bytes())?;
            Ok(json!({
                "status": "ok", "command": "sweep", "output": config.output,
                "rows": table.rows.len(), "shapes": corpus.len(), "failures": table.failures(),
            }))
        }
        Task::Sensitivity { corpus, sensitivity } => {
            let corpus = corpus.load()?;
            let report = sensitivity_sweep(&corpus, sensitivity)?;
            output::write_atomic(&config.output, report.to_csv().as_bytes())?;
            Ok(json!({
                "status": "ok", "command": "sensitivity", "output": config.output,
                "shapes": report.shapes, "failures": report.failures,
                "base_e_recon": report.base_e_recon, "alphas": sensitivity.alphas,
                "trials": sensitivity.trials, "seed": sensitivity.seed,
            }))
        }
        Task::Stats { corpus, bins } => {
            let corpus = corpus.load()?;
            let stats = coefficient_stats(&corpus, &config.encode_options(), *bins)?;
            output::write_atomic(&config.output, stats.to_csv().as_bytes())?;
            Ok(json!({
                "status": "ok", "command": "stats", "output": config.output,
                "shapes": stats.shapes, "failures": stats.failures,
            }))
        }
        Task::Ingest { annotations } => {
            let ing = bench::ingest_polygons(annotations)?;
            let files: Vec<(String, Vec<u8>)> = ing
                .corpus
                .shapes()
                .iter()
                .map(|(id, m)| (format!("{}.pbm", output::file_stem(id)), encode_pbm(m)))
                .collect();
            output::write_dir_atomic(&config.output, &files)?;
            Ok(json!({
                "status": "ok", "command": "ingest", "output": config.output,
                "shapes": ing.corpus.len(), "skipped_polygons": ing.skipped_polygons,
                "skipped_objects": ing.skipped_objects,
            }))
        }
    }
}

fn decode_all(vectors: &[ShapeVector], points: usize) -> Result<Vec<Contour>, ShapeError> {
    match DecodeBatch::from_shape_vectors(vectors, points) {
        Ok(mut batch) => {
            let l = batch.coeffs.ncols();
            BatchDecoder::new(batch.basis, l, points)?.decode(&mut batch)?;
            Ok((0..batch.len()).map(|b| batch.contour(b).expect("decoded")).collect())
        }
        // mixed bases or lengths: decode one at a time
        Err(ShapeError::DimensionMismatch(_)) => vectors.iter().map(|sv| decode_one(sv, points)).collect(),
        Err(e) => Err(e),
    }
}

impl RunConfig {
    pub fn encode_options(&self) -> EncodeOptions {
        EncodeOptions {
            basis: self.basis,
            l: self.l,
            tau: self.tau,
            normalize: self.normalize,
        }
    }
}
