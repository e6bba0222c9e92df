use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::approx::BasisKind;
use crate::bench::{
    generate_synthetic, ingest_polygons, GeneratorSpec, SensitivityConfig, ShapeCorpus, SignatureKind, SweepConfig,
};
use crate::error::ShapeError;
use crate::signature::angle_count;

use super::args::{Cli, Command, CorpusArgs, FitArgs};

/// Where a corpus study gets its masks from.
#[derive(Debug, Clone, PartialEq)]
pub enum CorpusSpec {
    Synthetic {
        spec: GeneratorSpec,
        count: usize,
        seed: u64,
    },
    Annotations(PathBuf),
    Masks(PathBuf),
}

impl CorpusSpec {
    pub fn load(&self) -> Result<ShapeCorpus, ShapeError> {
        match self {
            CorpusSpec::Synthetic { spec, count, seed } => generate_synthetic(spec, *count, *seed),
            CorpusSpec::Annotations(path) => {
                let ing = ingest_polygons(path)?;
                if ing.skipped_polygons + ing.skipped_objects > 0 {
                    log::warn!(
                        "{}: skipped {} polygons and {} objects",
                        path.display(),
                        ing.skipped_polygons,
                        ing.skipped_objects
                    );
                }
                Ok(ing.corpus)
            }
            CorpusSpec::Masks(dir) => ShapeCorpus::from_dir(dir),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Task {
    Encode {
        masks: Vec<PathBuf>,
    },
    Decode {
        input: PathBuf,
        raster: Option<(usize, usize)>,
    },
    Sweep {
        corpus: CorpusSpec,
        sweep: SweepConfig,
    },
    Sensitivity {
        corpus: CorpusSpec,
        sensitivity: SensitivityConfig,
    },
    Stats {
        corpus: CorpusSpec,
        bins: usize,
    },
    Ingest {
        annotations: PathBuf,
    },
}

/// Fully resolved run parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub task: Task,
    pub output: PathBuf,
    pub basis: BasisKind,
    pub l: usize,
    pub tau: f64,
    /// Angle count `N` (from `tau`) or decode point count.
    pub points: usize,
    pub normalize: bool,
    pub threads: usize,
}

/// Config-file lookup: `[command]` table first, then top level.
struct FileLayer {
    root: toml::Table,
    section: &'static str,
}

impl FileLayer {
    fn load(path: Option<&Path>, section: &'static str) -> Result<Self, String> {
        let root = match path {
            None => toml::Table::new(),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| format!("config {}: {e}", p.display()))?;
                text.parse::<toml::Table>()
                    .map_err(|e| format!("config {}: {}", p.display(), e.message()))?
            }
        };
        Ok(Self { root, section })
    }

    fn lookup(&self, key: &str) -> Option<&toml::Value> {
        let alt = key.replace('-', "_");
        let in_section = self
            .root
            .get(self.section)
            .and_then(|v| v.as_table())
            .and_then(|t| t.get(key).or_else(|| t.get(&alt)));
        in_section.or_else(|| self.root.get(key).or_else(|| self.root.get(&alt)))
    }

    fn text(&self, key: &str) -> Option<String> {
        self.lookup(key).map(|v| match v {
            toml::Value::String(s) => s.clone(),
            toml::Value::Array(items) => items
                .iter()
                .map(|i| match i {
                    toml::Value::String(s) => s.clone(),
                    other => other.to_string(),
                })
                .collect::<Vec<_>>()
                .join(","),
            other => other.to_string(),
        })
    }
}

/// Accumulates every problem so one run reports them all.
struct Resolver {
    file: FileLayer,
    errors: Vec<String>,
}

impl Resolver {
    fn pick<T: FromStr>(&mut self, key: &str, cli: Option<T>, default: T) -> T
    where
        T::Err: std::fmt::Display,
    {
        self.pick_opt(key, cli).unwrap_or(default)
    }

    fn pick_opt<T: FromStr>(&mut self, key: &str, cli: Option<T>) -> Option<T>
    where
        T::Err: std::fmt::Display,
    {
        if cli.is_some() {
            return cli;
        }
        let text = self.file.text(key)?;
        match text.parse::<T>() {
            Ok(v) => Some(v),
            Err(e) => {
                self.errors.push(format!("config key '{key}': {e}"));
                None
            }
        }
    }

    fn parsed<T>(&mut self, key: &str, text: Option<String>, parse: impl Fn(&str) -> Result<T, String>) -> Option<T> {
        let text = text.or_else(|| self.file.text(key))?;
        match parse(&text) {
            Ok(v) => Some(v),
            Err(e) => {
                self.errors.push(format!("--{key}: {e}"));
                None
            }
        }
    }

    fn path(&mut self, key: &str, cli: Option<PathBuf>) -> Option<PathBuf> {
        cli.or_else(|| self.file.text(key).map(PathBuf::from))
    }

    fn required_path(&mut self, key: &str, cli: Option<PathBuf>) -> PathBuf {
        self.path(key, cli).unwrap_or_else(|| {
            self.errors.push(format!("--{key} is required"));
            PathBuf::new()
        })
    }

    fn flag(&mut self, key: &str, cli: bool) -> bool {
        cli || self.pick_opt::<bool>(key, None).unwrap_or(false)
    }

    fn fit(&mut self, fit: &FitArgs, default_l: usize) -> (BasisKind, usize, f64) {
        let basis = self
            .parsed("basis", fit.basis.clone(), |s| {
                BasisKind::from_str(s).map_err(|e| e.to_string())
            })
            .unwrap_or(BasisKind::Chebyshev);
        let l = self.pick("dim", fit.dim, default_l);
        let tau = self.parsed("tau", fit.tau.clone(), parse_tau).unwrap_or(PI / 180.0);
        if let Err(e) = basis.check_len(l) {
            self.errors.push(format!("--dim: {e}"));
        }
        (basis, l, tau)
    }

    fn corpus(&mut self, c: &CorpusArgs) -> CorpusSpec {
        let synthetic = self.pick_opt("synthetic", c.synthetic);
        let annotations = self.path("corpus", c.corpus.clone());
        let masks = self.path("masks", c.masks.clone());
        let given = [synthetic.is_some(), annotations.is_some(), masks.is_some()]
            .iter()
            .filter(|b| **b)
            .count();
        if given != 1 {
            self.errors
                .push("exactly one of --synthetic, --corpus or --masks is required".to_string());
        }
        if let Some(dir) = masks {
            return CorpusSpec::Masks(dir);
        }
        if let Some(path) = annotations {
            return CorpusSpec::Annotations(path);
        }
        let (w, h) = self
            .parsed("resolution", c.resolution.clone(), parse_size)
            .unwrap_or((64, 64));
        let kinds = c
            .kinds
            .clone()
            .or_else(|| self.file.text("kinds"))
            .unwrap_or_else(|| "mixed".into());
        let spec = match GeneratorSpec::parse_kinds(&kinds, w, h) {
            Ok(s) => s,
            Err(e) => {
                self.errors.push(format!("--kinds: {e}"));
                GeneratorSpec::mixed(64, 64)
            }
        };
        let seed = self.pick("seed", c.seed, 0);
        CorpusSpec::Synthetic {
            spec,
            count: synthetic.unwrap_or(0),
            seed,
        }
    }
}

impl RunConfig {
    /// Merges command line (with environment), config file and defaults.
    pub fn resolve(cli: &Cli) -> Result<RunConfig, String> {
        let section = match &cli.command {
            Command::Encode(_) => "encode",
            Command::Decode(_) => "decode",
            Command::Sweep(_) => "sweep",
            Command::Sensitivity(_) => "sensitivity",
            Command::Stats(_) => "stats",
            Command::Ingest(_) => "ingest",
        };
        let file = FileLayer::load(cli.config.as_deref(), section)?;
        let mut r = Resolver {
            file,
            errors: Vec::new(),
        };
        let threads = r.pick("threads", cli.threads, 0);

        let mut basis = BasisKind::Chebyshev;
        let mut l = 20;
        let mut tau = PI / 180.0;
        let mut normalize = false;
        let mut points = 360;

        let (task, output) = match &cli.command {
            Command::Encode(a) => {
                (basis, l, tau) = r.fit(&a.fit, 20);
                normalize = r.flag("normalize", a.fit.normalize);
                let masks = if a.mask.is_empty() {
                    r.file
                        .text("mask")
                        .map(|s| s.split(',').map(|p| PathBuf::from(p.trim())).collect())
                        .unwrap_or_default()
                } else {
                    a.mask.clone()
                };
                if masks.is_empty() {
                    r.errors.push("--mask is required".into());
                }
                (Task::Encode { masks }, r.required_path("output", a.output.clone()))
            }
            Command::Decode(a) => {
                points = r.pick("points", a.points, 360);
                let input = r.required_path("in", a.input.clone());
                let raster = r.parsed("raster", a.raster.clone(), parse_size);
                (
                    Task::Decode { input, raster },
                    r.required_path("output", a.output.clone()),
                )
            }
            Command::Sweep(a) => {
                let corpus = r.corpus(&a.corpus);
                let defaults = SweepConfig::default();
                let signatures = r
                    .parsed("signatures", a.signatures.clone(), |s| {
                        parse_list(s, |t| t.parse::<SignatureKind>().map_err(|e| e.to_string()))
                    })
                    .unwrap_or(defaults.signatures);
                let bases = r
                    .parsed("bases", a.bases.clone(), |s| parse_list(s, parse_sweep_basis))
                    .unwrap_or(defaults.bases);
                let dims = r
                    .parsed("dims", a.dims.clone(), |s| {
                        parse_list(s, |t| t.parse::<usize>().map_err(|e| e.to_string()))
                    })
                    .unwrap_or(defaults.dims);
                let fit_points = r.pick("fit-points", a.fit_points, defaults.fit_points);
                points = fit_points;
                let sweep = SweepConfig {
                    signatures,
                    bases,
                    dims,
                    fit_points,
                };
                (
                    Task::Sweep { corpus, sweep },
                    r.required_path("output", a.output.clone()),
                )
            }
            Command::Sensitivity(a) => {
                let corpus = r.corpus(&a.corpus);
                (basis, l, tau) = r.fit(&a.fit, 8);
                let defaults = SensitivityConfig::default();
                let alphas = r
                    .parsed("alphas", a.alphas.clone(), |s| parse_list(s, parse_f64))
                    .unwrap_or(defaults.alphas);
                let trials = r.pick("trials", a.trials, defaults.trials);
                let seed = r.pick("seed", a.corpus.seed, 0);
                let sensitivity = SensitivityConfig {
                    basis,
                    l,
                    tau,
                    alphas,
                    trials,
                    seed,
                };
                (
                    Task::Sensitivity { corpus, sensitivity },
                    r.required_path("output", a.output.clone()),
                )
            }
            Command::Stats(a) => {
                let corpus = r.corpus(&a.corpus);
                (basis, l, tau) = r.fit(&a.fit, 20);
                normalize = r.flag("normalize", a.fit.normalize);
                let bins = r.pick("bins", a.bins, 20);
                if bins == 0 {
                    r.errors.push("--bins must be at least 1".into());
                }
                (
                    Task::Stats { corpus, bins },
                    r.required_path("output", a.output.clone()),
                )
            }
            Command::Ingest(a) => {
                let annotations = r.required_path("annotations", a.annotations.clone());
                (
                    Task::Ingest { annotations },
                    r.required_path("output", a.output.clone()),
                )
            }
        };

        if !matches!(task, Task::Decode { .. } | Task::Sweep { .. } | Task::Ingest { .. }) {
            match angle_count(tau) {
                Ok(n) => {
                    points = n;
                    if l > n {
                        r.errors.push(format!("--dim {l} exceeds the {n} angle samples"));
                    }
                }
                Err(e) => r.errors.push(format!("--tau: {e}")),
            }
        }
        if points < 3 {
            r.errors.push("at least 3 points are required".into());
        }

        if r.errors.is_empty() {
            Ok(RunConfig {
                task,
                output,
                basis,
                l,
                tau,
                points,
                normalize,
                threads,
            })
        } else {
            Err(r.errors.join("; "))
        }
    }
}

fn parse_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("'{s}' is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("'{s}' is not finite"))
    }
}

fn parse_list<T>(s: &str, item: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    let out = s
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(item)
        .collect::<Result<Vec<_>, _>>()?;
    if out.is_empty() {
        Err("empty list".into())
    } else {
        Ok(out)
    }
}

fn parse_sweep_basis(s: &str) -> Result<Option<BasisKind>, String> {
    if s.eq_ignore_ascii_case("raw") {
        Ok(None)
    } else {
        BasisKind::from_str(s).map(Some).map_err(|e| e.to_string())
    }
}

/// `1deg`, `0.5 deg`, `pi/180`, `2pi/360`, `0.01745rad` or plain radians.
pub(crate) fn parse_tau(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase();
    let value = if let Some(deg) = t.strip_suffix("deg") {
        parse_f64(deg)? * PI / 180.0
    } else if let Some(rad) = t.strip_suffix("rad") {
        parse_f64(rad)?
    } else if let Some((num, den)) = t.split_once('/') {
        let num = num.trim();
        let k = match num.strip_suffix("pi") {
            Some("") => 1.0,
            Some(k) => parse_f64(k.trim_end_matches('*'))?,
            None => return Err(format!("cannot read angle '{s}'")),
        };
        k * PI / parse_f64(den)?
    } else {
        parse_f64(&t)?
    };
    if value > 0.0 {
        Ok(value)
    } else {
        Err(format!("angle '{s}' must be positive"))
    }
}

/// `WxH`.
fn parse_size(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s
        .trim()
        .to_ascii_lowercase()
        .split_once('x')
        .map(|(a, b)| (a.trim().parse::<usize>(), b.trim().parse::<usize>()))
        .ok_or_else(|| format!("expected WxH, got '{s}'"))?;
    match (w, h) {
        (Ok(w), Ok(h)) if w > 0 && h > 0 => Ok((w, h)),
        _ => Err(format!("expected WxH with positive sizes, got '{s}'")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_forms() {
        let one = PI / 180.0;
        for s in [
            "1deg",
            "1 deg",
            "pi/180",
            "2pi/360",
            "0.017453292519943295",
            "0.017453292519943295rad",
        ] {
            assert!((parse_tau(s).unwrap() - one).abs() < 1e-15, "{s}");
        }
        assert!(parse_tau("-1deg").is_err());
        assert!(parse_tau("abc").is_err());
    }

    #[test]
    fn sizes() {
        assert_eq!(parse_size("64x48").unwrap(), (64, 48));
        assert!(parse_size("64").is_err());
        assert!(parse_size("0x4").is_err());
    }
}
