//! Per-coefficient noise sensitivity of the reconstruction error.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::csvfmt::real;
use super::{stream_rng, ShapeCorpus};
use crate::approx::BasisKind;
use crate::codec::{decode_one, EncodeOptions, Encoder, ShapeVector};
use crate::error::{Result, ShapeError};
use crate::geometry::{iou, rasterize, BinaryMask};
use crate::signature::angle_count;

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityConfig {
    pub basis: BasisKind,
    pub l: usize,
    pub tau: f64,
    /// Relative noise scales, strictly increasing.
    pub alphas: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
}

impl Default for SensitivityConfig {
    fn default() -> Self {
        Self {
            basis: BasisKind::Chebyshev,
            l: 8,
            tau: std::f64::consts::PI / 180.0,
            alphas: vec![0.0, 0.05, 0.1, 0.2, 0.4],
            trials: 20,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityEntry {
    pub index: usize,
    /// Corpus mean `k̄_i`; the noise standard deviation is `α·|k̄_i|`.
    pub mean_coeff: f64,
    /// `"pinned"` for a stored constant (fixed Fourier ω), `"zero_mean"`
    /// when `k̄_i = 0`, empty otherwise.
    pub flag: &'static str,
    /// `(α, mean ΔE_recon)`; empty for pinned coefficients.
    pub curve: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityReport {
    pub config: SensitivityConfig,
    pub base_e_recon: f64,
    pub shapes: usize,
    pub failures: usize,
    pub entries: Vec<SensitivityEntry>,
}

impl SensitivityReport {
    pub const HEADER: &'static str = "basis,l,index,mean_coeff,flag,alpha,delta_e_recon";

    /// Mean ΔE_recon of coefficient `index` at `alpha`.
    pub fn delta(&self, index: usize, alpha: f64) -> Option<f64> {
        self.entries
            .get(index)?
            .curve
            .iter()
            .find(|(a, _)| *a == alpha)
            .map(|(_, d)| *d)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(Self::HEADER.split(',')).expect("in-memory write");
        let basis = self.config.basis.name();
        let l = self.config.l.to_string();
        for e in &self.entries {
            let rows: Vec<(String, String)> = if e.curve.is_empty() {
                vec![(String::new(), String::new())]
            } else {
                e.curve.iter().map(|(a, d)| (real(*a), real(*d))).collect()
            };
            for (a, d) in rows {
                w.write_record([basis, &l, &e.index.to_string(), &real(e.mean_coeff), e.flag, &a, &d])
                    .expect("in-memory write");
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii csv")
    }
}

fn score(sv: &ShapeVector, mask: &BinaryMask, n: usize) -> Result<f64> {
    let contour = decode_one(sv, n)?;
    iou(&rasterize(&contour, mask.width(), mask.height())?.mask, mask)
}

/// `E_recon` change from adding exactly `delta` to coefficient `index`.
pub fn delta_e_recon(mask: &BinaryMask, sv: &ShapeVector, index: usize, delta: f64, n_points: usize) -> Result<f64> {
    if index >= sv.coeffs.len() {
        return Err(ShapeError::invalid(format!("coefficient index {index} out of range")));
    }
    let base = score(sv, mask, n_points)?;
    let mut perturbed = sv.clone();
    perturbed.coeffs.coeffs[index] += delta;
    Ok(base - score(&perturbed, mask, n_points)?)
}

/// Perturbs one coefficient at a time with `ε ~ N(0, α·|k̄_i|)` and reports
/// the mean increase in `E_recon` over shapes and trials.
///
/// Shape `s` draws its standard-normal variates from RNG stream `s` of the
/// seed, one per `(index, trial)`, and reuses them across `α`; results do
/// not depend on thread count.
pub fn sensitivity_sweep(corpus: &ShapeCorpus, config: &SensitivityConfig) -> Result<SensitivityReport> {
    if corpus.is_empty() {
        return Err(ShapeError::invalid("empty corpus"));
    }
    if config.trials == 0 {
        return Err(ShapeError::invalid("trials must be at least 1"));
    }
    if config
        .alphas
        .windows(2)
        .any(|w| w[0] >= w[1] || w[0].is_nan() || w[1].is_nan())
        || config.alphas.iter().any(|a| !(a.is_finite() && *a >= 0.0))
    {
        return Err(ShapeError::invalid(
            "alphas must be finite, non-negative and strictly increasing",
        ));
    }
    let n = angle_count(config.tau)?;
    let encoder = Encoder::new(EncodeOptions {
        basis: config.basis,
        l: config.l,
        tau: config.tau,
        normalize: false,
    })?;

    let encoded: Vec<Option<(ShapeVector, f64)>> = corpus
        .shapes()
        .par_iter()
        .map(|(_, mask)| {
            let sv = encoder.encode(mask).ok()?;
            let base = score(&sv, mask, n).ok()?;
            Some((sv, base))
        })
        .collect();
    let ok: Vec<_> = encoded
        .iter()
        .enumerate()
        .filter_map(|(i, e)| e.as_ref().map(|e| (i, e)))
        .collect();
    if ok.is_empty() {
        return Err(ShapeError::invalid("no shape could be encoded"));
    }
    let failures = encoded.len() - ok.len();
    let l = config.l;
    let mean_coeff: Vec<f64> = (0..l)
        .map(|i| ok.iter().map(|(_, (sv, _))| sv.coeffs.coeffs[i]).sum::<f64>() / ok.len() as f64)
        .collect();
    let pinned = |i: usize| config.basis == BasisKind::FourierFixed && i == 0;

    // per shape: [index][alpha] summed over trials
    let sums: Vec<Vec<Vec<f64>>> = ok
        .par_iter()
        .map(|&(s, (sv, base))| {
            let mask = &corpus.shapes()[s].1;
            let mut rng = stream_rng(config.seed, s as u64);
            let mut out = vec![vec![0.0; config.alphas.len()]; l];
            for i in 0..l {
                let z: Vec<f64> = (0..config.trials).map(|_| rng.sample(StandardNormal)).collect();
                if pinned(i) {
                    continue;
                }
                for (a, &alpha) in config.alphas.iter().enumerate() {
                    let sigma = alpha * mean_coeff[i].abs();
                    for &zt in &z {
                        let mut p = sv.clone();
                        p.coeffs.coeffs[i] += sigma * zt;
                        // a decode that fails scores as total loss
                        let e = score(&p, mask, n).unwrap_or(0.0);
                        out[i][a] += base - e;
                    }
                }
            }
            out
        })
        .collect();

    let denom = (ok.len() * config.trials) as f64;
    let entries = (0..l)
        .map(|i| {
            let flag = if pinned(i) {
                "pinned"
            } else if mean_coeff[i] == 0.0 {
                "zero_mean"
            } else {
                ""
            };
            let curve = if pinned(i) {
                Vec::new()
            } else {
                config
                    .alphas
                    .iter()
                    .enumerate()
                    .map(|(a, &alpha)| (alpha, sums.iter().map(|s| s[i][a]).sum::<f64>() / denom))
                    .collect()
            };
            SensitivityEntry {
                index: i,
                mean_coeff: mean_coeff[i],
                flag,
                curve,
            }
        })
        .collect();
    let base_e_recon = 1.0 - ok.iter().map(|(_, (_, b))| b).sum::<f64>() / ok.len() as f64;
    Ok(SensitivityReport {
        config: config.clone(),
        base_e_recon,
        shapes: ok.len(),
        failures,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::{generate_synthetic, GeneratorSpec};

    fn small() -> ShapeCorpus {
        generate_synthetic(&GeneratorSpec::mixed(40, 40), 5, 2).unwrap()
    }

    #[test]
    fn zero_alpha_changes_nothing() {
        let cfg = SensitivityConfig {
            alphas: vec![0.0, 0.1],
            trials: 3,
            ..SensitivityConfig::default()
        };
        let rep = sensitivity_sweep(&small(), &cfg).unwrap();
        assert_eq!(rep.entries.len(), 8);
        for e in &rep.entries {
            assert_eq!(e.curve[0], (0.0, 0.0));
        }
        assert!(rep.delta(0, 0.1).unwrap() > 0.0);
    }

    #[test]
    fn deterministic_given_seed() {
        let cfg = SensitivityConfig {
            alphas: vec![0.1],
            trials: 2,
            seed: 9,
            ..SensitivityConfig::default()
        };
        let a = sensitivity_sweep(&small(), &cfg).unwrap();
        let b = super::super::with_threads(1, || sensitivity_sweep(&small(), &cfg))
            .unwrap()
            .unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_csv(), b.to_csv());
    }

    #[test]
    fn pinned_omega_is_flagged() {
        let cfg = SensitivityConfig {
            basis: BasisKind::FourierFixed,
            alphas: vec![0.1],
            trials: 1,
            ..SensitivityConfig::default()
        };
        let rep = sensitivity_sweep(&small(), &cfg).unwrap();
        assert_eq!(rep.entries[0].flag, "pinned");
        assert!(rep.entries[0].curve.is_empty());
        assert!(rep.to_csv().lines().nth(1).unwrap().contains("pinned"));
    }

    #[test]
    fn rejects_bad_config() {
        let bad = SensitivityConfig {
            alphas: vec![0.2, 0.1],
            ..SensitivityConfig::default()
        };
        assert!(sensitivity_sweep(&small(), &bad).is_err());
        let none = SensitivityConfig {
            trials: 0,
            ..SensitivityConfig::default()
        };
        assert!(sensitivity_sweep(&small(), &none).is_err());
    }
}
