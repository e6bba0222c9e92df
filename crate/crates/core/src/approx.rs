//! Least-squares fitting of periodic 1D signatures with Chebyshev,
//! Fourier and monomial bases.
//!
//! Angles `θ ∈ [0, 2π)` map to `x = θ/π − 1 ∈ [−1, 1)` for the polynomial
//! bases; the Fourier bases use `θ` directly. Coefficient layouts:
//!
//! | basis          | `coeffs`                                  | length  |
//! |----------------|-------------------------------------------|---------|
//! | Chebyshev      | `c_0 .. c_{l-1}`                          | `l`     |
//! | Monomial       | `v_0 .. v_{l-1}`                          | `l`     |
//! | Fourier (both) | `ω, a_0, a_1 .. a_n, b_1 .. b_n`          | `2n+2`  |
//!
//! A truncated Fourier series is `a_0/2 + Σ a_i cos(iωθ) + b_i sin(iωθ)`.
//! The fixed variant stores `ω = 1` and never fits it.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Result, ShapeError};
use crate::signature::{uniform_angles, RadialSignature, XYSignature};

/// Ridge weight relative to the mean squared column norm of the design.
pub const RIDGE: f64 = 1e-20;
/// Search interval for the free Fourier frequency.
pub const OMEGA_MAX: f64 = 4.0;
const OMEGA_MIN: f64 = 1e-3;
const OMEGA_GRID: usize = 40;
/// Bracket width at which the golden-section search stops.
pub const OMEGA_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    Chebyshev,
    FourierFree,
    FourierFixed,
    Monomial,
}

impl BasisKind {
    pub const ALL: [BasisKind; 4] = [
        BasisKind::Chebyshev,
        BasisKind::FourierFree,
        BasisKind::FourierFixed,
        BasisKind::Monomial,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BasisKind::Chebyshev => "chebyshev",
            BasisKind::FourierFree => "fourier_free",
            BasisKind::FourierFixed => "fourier_fixed",
            BasisKind::Monomial => "monomial",
        }
    }

    pub fn is_fourier(self) -> bool {
        matches!(self, BasisKind::FourierFree | BasisKind::FourierFixed)
    }

    /// Checks that `l` is a valid coefficient count for this basis.
    pub fn check_len(self, l: usize) -> Result<()> {
        if l == 0 {
            return Err(ShapeError::invalid("coefficient count must be at least 1"));
        }
        if self.is_fourier() && (l < 2 || !l.is_multiple_of(2)) {
            return Err(ShapeError::invalid(format!(
                "{} needs an even coefficient count 2n+2, got {l}",
                self.name()
            )));
        }
        Ok(())
    }

    /// Number of fitted linear weights (excludes the stored `ω`).
    pub fn weight_count(self, l: usize) -> usize {
        if self.is_fourier() {
            l - 1
        } else {
            l
        }
    }

    fn tag(self) -> u8 {
        match self {
            BasisKind::Chebyshev => 0,
            BasisKind::FourierFree => 1,
            BasisKind::FourierFixed => 2,
            BasisKind::Monomial => 3,
        }
    }

    fn from_tag(tag: u8) -> Option<Self> {
        BasisKind::ALL.into_iter().find(|b| b.tag() == tag)
    }
}

impl fmt::Display for BasisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BasisKind {
    type Err = ShapeError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "cheby" | "chebyshev" => Ok(BasisKind::Chebyshev),
            "fourier" | "fourier_free" => Ok(BasisKind::FourierFree),
            "fourier_fixed" => Ok(BasisKind::FourierFixed),
            "poly" | "polynomial" | "monomial" => Ok(BasisKind::Monomial),
            other => Err(ShapeError::invalid(format!("unknown basis '{other}'"))),
        }
    }
}

/// Fitted coefficients `k` together with their basis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientVector {
    pub basis: BasisKind,
    pub coeffs: Vec<f64>,
}

#[derive(Deserialize)]
struct RawCoefficients {
    basis: BasisKind,
    coeffs: Vec<f64>,
}

impl<'de> Deserialize<'de> for CoefficientVector {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawCoefficients::deserialize(deserializer)?;
        CoefficientVector::new(raw.basis, raw.coeffs).map_err(serde::de::Error::custom)
    }
}

impl CoefficientVector {
    pub fn new(basis: BasisKind, coeffs: Vec<f64>) -> Result<Self> {
        basis.check_len(coeffs.len())?;
        if let Some(i) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(ShapeError::invalid(format!("coefficient {i} is not finite")));
        }
        if basis == BasisKind::FourierFixed && coeffs[0] != 1.0 {
            return Err(ShapeError::invalid("fourier_fixed stores ω = 1"));
        }
        Ok(Self { basis, coeffs })
    }

    pub fn zeros(basis: BasisKind, l: usize) -> Result<Self> {
        basis.check_len(l)?;
        let mut coeffs = vec![0.0; l];
        if basis.is_fourier() {
            coeffs[0] = 1.0;
        }
        Ok(Self { basis, coeffs })
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Frequency of a Fourier vector; 1 for the polynomial bases.
    pub fn omega(&self) -> f64 {
        if self.basis.is_fourier() {
            self.coeffs[0]
        } else {
            1.0
        }
    }

    /// The linear weights multiplying the basis functions.
    pub fn weights(&self) -> &[f64] {
        if self.basis.is_fourier() {
            &self.coeffs[1..]
        } else {
            &self.coeffs
        }
    }

    /// `[tag: u8][len: u32 LE][len × f64 LE]`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(5 + 8 * self.coeffs.len());
        out.push(self.basis.tag());
        out.extend_from_slice(&(self.coeffs.len() as u32).to_le_bytes());
        for c in &self.coeffs {
            out.extend_from_slice(&c.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let err = |m: &str| ShapeError::Parse {
            context: "binary coefficient vector".into(),
            message: m.into(),
        };
        let (&tag, rest) = bytes.split_first().ok_or_else(|| err("empty input"))?;
        let basis = BasisKind::from_tag(tag).ok_or_else(|| err("unknown basis tag"))?;
        if rest.len() < 4 {
            return Err(err("missing length prefix"));
        }
        let len = u32::from_le_bytes(rest[..4].try_into().unwrap()) as usize;
        let body = &rest[4..];
        if body.len() != 8 * len {
            return Err(err("payload length does not match prefix"));
        }
        let coeffs = body
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        CoefficientVector::new(basis, coeffs)
    }
}

/// First-kind Chebyshev polynomial by the three-term recurrence.
pub fn chebyshev_t(n: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, x);
    match n {
        0 => prev,
        _ => {
            for _ in 1..n {
                let next = 2.0 * x * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Affine map `[0, 2π) → [−1, 1)` used by the polynomial bases.
#[inline]
pub fn map_angle(theta: f64) -> f64 {
    theta / PI - 1.0
}

/// Writes the basis-function values at `theta` into `row`
/// (`row.len() == basis.weight_count(l)`).
pub fn basis_row(basis: BasisKind, omega: f64, theta: f64, row: &mut [f64]) {
    let m = row.len();
    match basis {
        BasisKind::Chebyshev => {
            let x = map_angle(theta);
            let (mut prev, mut cur) = (1.0, x);
            for (i, slot) in row.iter_mut().enumerate() {
                *slot = match i {
                    0 => 1.0,
                    1 => x,
                    _ => {
                        let next = 2.0 * x * cur - prev;
                        prev = cur;
                        cur = next;
                        next
                    }
                };
            }
        }
        BasisKind::Monomial => {
            let x = map_angle(theta);
            let mut p = 1.0;
            for slot in row.iter_mut() {
                *slot = p;
                p *= x;
            }
        }
        BasisKind::FourierFree | BasisKind::FourierFixed => {
            let n = (m - 1) / 2;
            row[0] = 0.5;
            for i in 1..=n {
                let (s, c) = (i as f64 * omega * theta).sin_cos();
                row[i] = c;
                row[n + i] = s;
            }
        }
    }
}

/// Series value at each angle.
pub fn evaluate(coeffs: &CoefficientVector, thetas: &[f64]) -> Vec<f64> {
    let weights = coeffs.weights();
    let omega = coeffs.omega();
    let mut row = vec![0.0; weights.len()];
    thetas
        .iter()
        .map(|&theta| {
            basis_row(coeffs.basis, omega, theta, &mut row);
            row.iter().zip(weights).map(|(b, w)| b * w).sum()
        })
        .collect()
}

/// `m × N` matrix of basis values, one column per angle.
pub fn basis_matrix(basis: BasisKind, weights: usize, omega: f64, thetas: &[f64]) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(weights, thetas.len());
    let mut row = vec![0.0; weights];
    for (j, &theta) in thetas.iter().enumerate() {
        basis_row(basis, omega, theta, &mut row);
        out.column_mut(j).copy_from_slice(&row);
    }
    out
}

/// Ridge least-squares solver for one basis and frequency: thin
/// Householder QR of the design matrix stacked on `√λ·I`, which never
/// forms the normal equations.
struct LinearPlan {
    design: DMatrix<f64>,
    q: DMatrix<f64>,
    r: DMatrix<f64>,
}

impl LinearPlan {
    fn new(basis: BasisKind, weights: usize, omega: f64, thetas: &[f64]) -> Result<Self> {
        let design = basis_matrix(basis, weights, omega, thetas).transpose();
        let rows = design.nrows();
        let lambda = RIDGE * design.norm_squared() / weights as f64;
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(ShapeError::SingularFit);
        }
        let mut augmented = DMatrix::zeros(rows + weights, weights);
        augmented.rows_mut(0, rows).copy_from(&design);
        for i in 0..weights {
            augmented[(rows + i, i)] = lambda.sqrt();
        }
        let (q, r) = augmented.qr().unpack();
        let q = q.rows(0, rows).into_owned();
        Ok(Self { design, q, r })
    }

    fn solve(&self, values: &DVector<f64>) -> Result<(DVector<f64>, f64)> {
        let qtb = self.q.tr_mul(values);
        let w = self.r.solve_upper_triangular(&qtb).ok_or(ShapeError::SingularFit)?;
        if w.iter().any(|v| !v.is_finite()) {
            return Err(ShapeError::SingularFit);
        }
        let residual = (values - &self.design * &w).norm_squared();
        Ok((w, residual))
    }
}

/// Least-squares fitter for signatures sampled on `N` uniform angles.
///
/// For fixed-frequency bases the QR factors depend only on `(basis, l, N)`
/// and are computed once, so fitting a whole corpus costs one `Qᵀb` and
/// one triangular solve per shape.
pub struct Fitter {
    basis: BasisKind,
    l: usize,
    thetas: Vec<f64>,
    plan: Option<LinearPlan>,
}

impl Fitter {
    pub fn new(basis: BasisKind, l: usize, samples: usize) -> Result<Self> {
        basis.check_len(l)?;
        if l > samples {
            return Err(ShapeError::TooManyCoefficients { requested: l, samples });
        }
        let thetas = uniform_angles(samples);
        let plan = match basis {
            BasisKind::FourierFree => None,
            _ => Some(LinearPlan::new(basis, basis.weight_count(l), 1.0, &thetas)?),
        };
        Ok(Self { basis, l, thetas, plan })
    }

    pub fn basis(&self) -> BasisKind {
        self.basis
    }

    pub fn len(&self) -> usize {
        self.l
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn samples(&self) -> usize {
        self.thetas.len()
    }

    /// Fits `values` (one per uniform angle) and returns the coefficients
    /// and the residual sum of squares.
    pub fn fit_with_residual(&self, values: &[f64]) -> Result<(CoefficientVector, f64)> {
        if values.len() != self.thetas.len() {
            return Err(ShapeError::DimensionMismatch(format!(
                "{} samples for a fitter built on {}",
                values.len(),
                self.thetas.len()
            )));
        }
        let b = DVector::from_column_slice(values);
        let (omega, w, residual) = match &self.plan {
            Some(plan) => {
                let (w, r) = plan.solve(&b)?;
                (1.0, w, r)
            }
            None => self.fit_free_frequency(&b)?,
        };
        let mut coeffs = Vec::with_capacity(self.l);
        if self.basis.is_fourier() {
            coeffs.push(omega);
        }
        coeffs.extend(w.iter());
        Ok((CoefficientVector::new(self.basis, coeffs)?, residual))
    }

    pub fn fit(&self, values: &[f64]) -> Result<CoefficientVector> {
        self.fit_with_residual(values).map(|(c, _)| c)
    }

    /// Coarse scan of `ω` on a fixed grid, then golden-section refinement
    /// inside the bracket around the best grid point.
    fn fit_free_frequency(&self, b: &DVector<f64>) -> Result<(f64, DVector<f64>, f64)> {
        let weights = self.basis.weight_count(self.l);
        let eval = |omega: f64| -> Result<(DVector<f64>, f64)> {
            LinearPlan::new(self.basis, weights, omega, &self.thetas)?.solve(b)
        };
        let step = OMEGA_MAX / OMEGA_GRID as f64;
        let mut best = (f64::NAN, f64::INFINITY);
        for k in 1..=OMEGA_GRID {
            let omega = k as f64 * step;
            if let Ok((_, r)) = eval(omega) {
                if r < best.1 {
                    best = (omega, r);
                }
            }
        }
        if !best.0.is_finite() {
            return Err(ShapeError::SingularFit);
        }
        let (mut lo, mut hi) = ((best.0 - step).max(OMEGA_MIN), (best.0 + step).min(OMEGA_MAX));
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        let mut c = hi - golden * (hi - lo);
        let mut d = lo + golden * (hi - lo);
        let residual = |omega: f64| eval(omega).map(|(_, r)| r).unwrap_or(f64::INFINITY);
        let (mut fc, mut fd) = (residual(c), residual(d));
        while hi - lo > OMEGA_TOL {
            if fc <= fd {
                hi = d;
                d = c;
                fd = fc;
                c = hi - golden * (hi - lo);
                fc = residual(c);
            } else {
                lo = c;
                c = d;
                fc = fd;
                d = lo + golden * (hi - lo);
                fd = residual(d);
            }
        }
        let mut omega = 0.5 * (lo + hi);
        let (mut w, mut r) = eval(omega)?;
        if best.1 < r {
            omega = best.0;
            (w, r) = eval(omega)?;
        }
        Ok((omega, w, r))
    }
}

/// Fits `values` sampled at `values.len()` uniform angles over `[0, 2π)`.
pub fn fit_samples(values: &[f64], basis: BasisKind, l: usize) -> Result<CoefficientVector> {
    Fitter::new(basis, l, values.len())?.fit(values)
}

/// Least-squares fit of an IR signature.
pub fn fit(sig: &RadialSignature, basis: BasisKind, l: usize) -> Result<CoefficientVector> {
    fit_samples(&sig.radii, basis, l)
}

/// Independent Chebyshev fits of the `x` and `y` coordinates of an XY
/// signature against its arc-length parameter.
pub fn fit_xy(sig: &XYSignature, l_each: usize) -> Result<(CoefficientVector, CoefficientVector)> {
    let xs: Vec<f64> = sig.points.iter().map(|p| p.x).collect();
    let ys: Vec<f64> = sig.points.iter().map(|p| p.y).collect();
    let fitter = Fitter::new(BasisKind::Chebyshev, l_each, xs.len())?;
    Ok((fitter.fit(&xs)?, fitter.fit(&ys)?))
}

/// Sum of squared residuals of `coeffs` against samples on the uniform grid.
pub fn residual(coeffs: &CoefficientVector, values: &[f64]) -> f64 {
    evaluate(coeffs, &uniform_angles(values.len()))
        .iter()
        .zip(values)
        .map(|(f, v)| (f - v) * (f - v))
        .sum()
}
