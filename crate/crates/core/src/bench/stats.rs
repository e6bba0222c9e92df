//! Per-index coefficient statistics over a corpus.

use rayon::prelude::*;

use super::csvfmt::real;
use super::ShapeCorpus;
use crate::approx::BasisKind;
use crate::codec::{EncodeOptions, Encoder};
use crate::error::{Result, ShapeError};

#[derive(Debug, Clone, PartialEq)]
pub struct IndexStats {
    pub index: usize,
    pub mean: f64,
    /// Population variance.
    pub variance: f64,
    pub min: f64,
    pub max: f64,
    /// Equal-width bins over `[min, max]`; the top edge belongs to the last bin.
    pub histogram: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientStats {
    pub basis: BasisKind,
    pub l: usize,
    pub shapes: usize,
    pub failures: usize,
    pub per_index: Vec<IndexStats>,
}

impl CoefficientStats {
    pub const HEADER: &'static str = "basis,index,mean,variance,min,max,histogram";

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(Self::HEADER.split(',')).expect("in-memory write");
        for s in &self.per_index {
            let hist: Vec<String> = s.histogram.iter().map(u64::to_string).collect();
            w.write_record([
                self.basis.name().to_string(),
                s.index.to_string(),
                real(s.mean),
                real(s.variance),
                real(s.min),
                real(s.max),
                hist.join(";"),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii csv")
    }
}

/// Encodes the corpus and summarizes each coefficient index with a
/// streaming (Welford) mean and variance plus a `bins`-bin histogram.
pub fn coefficient_stats(corpus: &ShapeCorpus, options: &EncodeOptions, bins: usize) -> Result<CoefficientStats> {
    if corpus.is_empty() {
        return Err(ShapeError::invalid("empty corpus"));
    }
    if bins == 0 {
        return Err(ShapeError::invalid("histogram needs at least one bin"));
    }
    let encoder = Encoder::new(*options)?;
    let encoded: Vec<Option<Vec<f64>>> = corpus
        .shapes()
        .par_iter()
        .map(|(_, m)| encoder.encode(m).ok().map(|sv| sv.coeffs.coeffs))
        .collect();
    let rows: Vec<&Vec<f64>> = encoded.iter().flatten().collect();
    if rows.is_empty() {
        return Err(ShapeError::invalid("no shape could be encoded"));
    }
    let per_index = (0..options.l)
        .map(|i| {
            let (mut n, mut mean, mut m2) = (0.0f64, 0.0f64, 0.0f64);
            let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
            for row in &rows {
                let x = row[i];
                n += 1.0;
                let d = x - mean;
                mean += d / n;
                m2 += d * (x - mean);
                min = min.min(x);
                max = max.max(x);
            }
            let mut histogram = vec![0u64; bins];
            let width = (max - min) / bins as f64;
            for row in &rows {
                let b = if width > 0.0 {
                    (((row[i] - min) / width) as usize).min(bins - 1)
                } else {
                    0
                };
                histogram[b] += 1;
            }
            IndexStats {
                index: i,
                mean,
                variance: m2 / n,
                min,
                max,
                histogram,
            }
        })
        .collect();
    Ok(CoefficientStats {
        basis: options.basis,
        l: options.l,
        shapes: rows.len(),
        failures: encoded.len() - rows.len(),
        per_index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::{generate_synthetic, GeneratorSpec, ShapeKind};

    #[test]
    fn disc_corpus_is_dominated_by_c0() {
        let corpus = generate_synthetic(&GeneratorSpec::only(ShapeKind::Disc, 64, 64), 12, 4).unwrap();
        let opts = EncodeOptions {
            l: 8,
            ..EncodeOptions::default()
        };
        let st = coefficient_stats(&corpus, &opts, 10).unwrap();
        assert_eq!(st.shapes, 12);
        assert!(st.per_index[0].mean > 10.0);
        let v0 = st.per_index[0].variance;
        for s in &st.per_index[1..] {
            assert!(
                s.variance < 0.05 * v0,
                "index {} variance {} vs {v0}",
                s.index,
                s.variance
            );
        }
        assert_eq!(st.per_index[0].histogram.iter().sum::<u64>(), 12);
    }

    #[test]
    fn csv_has_one_row_per_index() {
        let corpus = generate_synthetic(&GeneratorSpec::mixed(32, 32), 4, 4).unwrap();
        let opts = EncodeOptions {
            l: 6,
            ..EncodeOptions::default()
        };
        let csv = coefficient_stats(&corpus, &opts, 4).unwrap().to_csv();
        assert_eq!(csv.lines().count(), 7);
        assert!(coefficient_stats(&corpus, &opts, 0).is_err());
    }
}
