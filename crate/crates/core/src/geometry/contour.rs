use serde::{Deserialize, Serialize};

use crate::error::{Result, ShapeError};

/// A point in pixel units. Serializes as `[x, y]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn distance(&self, other: &Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

impl From<[f64; 2]> for Point2 {
    fn from([x, y]: [f64; 2]) -> Self {
        Self { x, y }
    }
}

impl From<Point2> for [f64; 2] {
    fn from(p: Point2) -> Self {
        [p.x, p.y]
    }
}

impl std::ops::Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl std::ops::Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

/// Closed polygon; the last vertex connects back to the first.
///
/// Contours built with [`Contour::new`] have at least three finite vertices
/// and no vertex repeated consecutively. Polygons produced by decoding may
/// collapse several vertices onto the center when radii clamp to zero; those
/// come from [`Contour::from_decoded`] and are reported as degenerate by
/// [`crate::rasterize`] when their area vanishes.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Contour {
    vertices: Vec<Point2>,
}

impl<'de> Deserialize<'de> for Contour {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let vertices = Vec::<Point2>::deserialize(deserializer)?;
        Contour::new(vertices).map_err(serde::de::Error::custom)
    }
}

impl Contour {
    pub fn new(vertices: Vec<Point2>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(ShapeError::InvalidContour(format!(
                "need at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        if let Some(i) = vertices.iter().position(|p| !p.is_finite()) {
            return Err(ShapeError::InvalidContour(format!("vertex {i} is not finite")));
        }
        let n = vertices.len();
        for i in 0..n {
            if vertices[i] == vertices[(i + 1) % n] {
                return Err(ShapeError::InvalidContour(format!(
                    "vertex {} repeats vertex {i}",
                    (i + 1) % n
                )));
            }
        }
        Ok(Self { vertices })
    }

    /// Wraps polar-decoded vertices without the repeat check.
    pub(crate) fn from_decoded(vertices: Vec<Point2>) -> Self {
        debug_assert!(vertices.len() >= 3);
        Self { vertices }
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Iterates closed edges `(v[i], v[i+1 mod n])`.
    pub fn edges(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Shoelace area; positive when the vertices turn counter-clockwise in
    /// the `(x, y)` frame.
    pub fn signed_area(&self) -> f64 {
        0.5 * self.edges().map(|(a, b)| a.x * b.y - b.x * a.y).sum::<f64>()
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(a, b)| a.distance(&b)).sum()
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Contour {
        Contour {
            vertices: self.vertices.iter().map(|p| Point2::new(p.x + dx, p.y + dy)).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("contour serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| ShapeError::Parse {
            context: "contour JSON".into(),
            message: e.to_string(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Contour {
        Contour::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(4.0, 0.0),
            Point2::new(4.0, 4.0),
            Point2::new(0.0, 4.0),
        ])
        .unwrap()
    }

    #[test]
    fn validation() {
        assert!(Contour::new(vec![Point2::new(0.0, 0.0), Point2::new(1.0, 1.0)]).is_err());
        let repeated = vec![Point2::new(0.0, 0.0), Point2::new(0.0, 0.0), Point2::new(1.0, 1.0)];
        assert!(Contour::new(repeated).is_err());
        let wraps = vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 0.0)];
        assert!(Contour::new(wraps).is_err());
        let nan = vec![Point2::new(f64::NAN, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)];
        assert!(Contour::new(nan).is_err());
    }

    #[test]
    fn area_and_perimeter() {
        let sq = square();
        assert_eq!(sq.signed_area(), 16.0);
        assert_eq!(sq.perimeter(), 16.0);
    }

    #[test]
    fn json_is_array_of_pairs() {
        let sq = square();
        let text = sq.to_json();
        assert_eq!(text, "[[0.0,0.0],[4.0,0.0],[4.0,4.0],[0.0,4.0]]");
        assert_eq!(Contour::from_json(&text).unwrap(), sq);
        assert!(Contour::from_json("[[0,0],[1,1]]").is_err());
    }
}
