use super::BinaryMask;
use crate::error::{Result, ShapeError};

/// Per-pixel Euclidean distance to the nearest background pixel center.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceField {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl DistanceField {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    /// Location and value of the maximum; ties resolve to the first pixel
    /// in row-major order.
    pub fn argmax(&self) -> (usize, usize, f64) {
        let mut best = (0, f64::NEG_INFINITY);
        for (i, &v) in self.values.iter().enumerate() {
            if v > best.1 {
                best = (i, v);
            }
        }
        (best.0 % self.width, best.0 / self.width, best.1)
    }
}

/// Exact Euclidean distance transform.
///
/// Pixels outside the frame count as background, so a foreground pixel on
/// the border is at distance 1. Runs the separable lower-envelope algorithm
/// of Felzenszwalb and Huttenlocher on a grid padded by one background pixel.
pub fn distance_transform(mask: &BinaryMask) -> Result<DistanceField> {
    if mask.is_empty() {
        return Err(ShapeError::EmptyShape);
    }
    let (w, h) = (mask.width(), mask.height());
    let (pw, ph) = (w + 2, h + 2);
    let mut grid = vec![0.0f64; pw * ph];
    for (x, y) in mask.foreground() {
        grid[(y + 1) * pw + x + 1] = f64::INFINITY;
    }

    let mut scratch = Scratch::new(pw.max(ph));
    let mut line = vec![0.0; pw.max(ph)];
    // columns
    for x in 0..pw {
        for y in 0..ph {
            line[y] = grid[y * pw + x];
        }
        scratch.transform(&line[..ph]);
        for y in 0..ph {
            grid[y * pw + x] = scratch.out[y];
        }
    }
    // rows
    for y in 0..ph {
        line[..pw].copy_from_slice(&grid[y * pw..(y + 1) * pw]);
        scratch.transform(&line[..pw]);
        grid[y * pw..(y + 1) * pw].copy_from_slice(&scratch.out[..pw]);
    }

    let mut values = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            values.push(grid[(y + 1) * pw + x + 1].sqrt());
        }
    }
    Ok(DistanceField {
        width: w,
        height: h,
        values,
    })
}

struct Scratch {
    vertices: Vec<usize>,
    bounds: Vec<f64>,
    out: Vec<f64>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Self {
            vertices: vec![0; n],
            bounds: vec![0.0; n + 1],
            out: vec![0.0; n],
        }
    }

    /// 1D squared distance transform of the sampled function `f`.
    fn transform(&mut self, f: &[f64]) {
        let n = f.len();
        let v = &mut self.vertices;
        let z = &mut self.bounds;
        // Lower envelope over the finite samples only.
        let mut k: isize = -1;
        for q in 0..n {
            if !f[q].is_finite() {
                continue;
            }
            loop {
                if k < 0 {
                    k = 0;
                    v[0] = q;
                    z[0] = f64::NEG_INFINITY;
                    z[1] = f64::INFINITY;
                    break;
                }
                let p = v[k as usize];
                let s = ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64));
                if s <= z[k as usize] {
                    k -= 1;
                    continue;
                }
                k += 1;
                v[k as usize] = q;
                z[k as usize] = s;
                z[k as usize + 1] = f64::INFINITY;
                break;
            }
        }
        if k < 0 {
            self.out[..n].fill(f64::INFINITY);
            return;
        }
        let mut j = 0usize;
        for q in 0..n {
            while z[j + 1] < q as f64 {
                j += 1;
            }
            let p = v[j];
            let d = q as f64 - p as f64;
            self.out[q] = d * d + f[p];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_pixel_frame() {
        let m = BinaryMask::new(1, 1, vec![true]).unwrap();
        let df = distance_transform(&m).unwrap();
        assert_eq!(df.values(), &[1.0]);
    }

    #[test]
    fn full_five_by_five() {
        let m = BinaryMask::from_fn(5, 5, |_, _| true);
        let df = distance_transform(&m).unwrap();
        assert_eq!(df.get(2, 2), 3.0);
        for (x, y) in [(0, 0), (4, 0), (0, 4), (4, 4)] {
            assert_eq!(df.get(x, y), 1.0);
        }
        assert_eq!(df.argmax(), (2, 2, 3.0));
    }

    #[test]
    fn isolated_pixel() {
        let m = BinaryMask::from_fn(5, 5, |x, y| x == 2 && y == 2);
        let df = distance_transform(&m).unwrap();
        for y in 0..5 {
            for x in 0..5 {
                let expected = if (x, y) == (2, 2) { 1.0 } else { 0.0 };
                assert_eq!(df.get(x, y), expected);
            }
        }
    }

    #[test]
    fn empty_mask_is_rejected() {
        assert!(matches!(
            distance_transform(&BinaryMask::zeros(4, 4)),
            Err(ShapeError::EmptyShape)
        ));
    }

    #[test]
    fn diagonal_distances_are_euclidean() {
        // single background hole far enough from the frame
        let m = BinaryMask::from_fn(21, 21, |x, y| !(x == 10 && y == 10));
        let df = distance_transform(&m).unwrap();
        assert!((df.get(13, 14) - 5.0).abs() < 1e-12);
    }
}
