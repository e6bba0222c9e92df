use std::collections::HashMap;

use super::morph::label_components;
use super::{BinaryMask, Contour, Point2};
use crate::error::{Result, ShapeError};

/// Outer boundary of every 8-connected component.
///
/// Contours run along pixel edges (integer corner coordinates), so
/// rasterizing one reproduces its component exactly apart from filled holes.
/// Vertices turn counter-clockwise in the `(x, y)` frame (positive
/// [`Contour::signed_area`]) and collinear runs are merged. Components are
/// returned in row-major order of their first pixel.
pub fn trace_contour(mask: &BinaryMask) -> Result<Vec<Contour>> {
    if mask.is_empty() {
        return Err(ShapeError::EmptyShape);
    }
    let (labels, count) = label_components(mask);
    let w = mask.width();
    let mut seeds = vec![usize::MAX; count as usize + 1];
    for (i, &l) in labels.iter().enumerate() {
        if l != 0 && seeds[l as usize] == usize::MAX {
            seeds[l as usize] = i;
        }
    }
    (1..=count)
        .map(|label| {
            let seed = seeds[label as usize];
            trace_component(&labels, w, mask.height(), label, (seed % w, seed / w))
        })
        .collect()
}

type Corner = (i64, i64);

fn trace_component(labels: &[u32], w: usize, h: usize, label: u32, seed: (usize, usize)) -> Result<Contour> {
    let inside = |x: i64, y: i64| {
        x >= 0 && y >= 0 && (x as usize) < w && (y as usize) < h && labels[y as usize * w + x as usize] == label
    };

    // Directed boundary edges with the component on the left in the
    // (x, y) frame. A corner where two diagonal pixels meet has two
    // outgoing edges.
    let mut outgoing: HashMap<Corner, Vec<Corner>> = HashMap::new();
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            if !inside(x, y) {
                continue;
            }
            if !inside(x, y - 1) {
                outgoing.entry((x, y)).or_default().push((x + 1, y));
            }
            if !inside(x + 1, y) {
                outgoing.entry((x + 1, y)).or_default().push((x + 1, y + 1));
            }
            if !inside(x, y + 1) {
                outgoing.entry((x + 1, y + 1)).or_default().push((x, y + 1));
            }
            if !inside(x - 1, y) {
                outgoing.entry((x, y + 1)).or_default().push((x, y));
            }
        }
    }

    // The seed is the first pixel in row-major order, so its top side
    // (y minimum) lies on the outer boundary.
    let start: Corner = (seed.0 as i64, seed.1 as i64);
    let first: Corner = (start.0 + 1, start.1);
    let mut path: Vec<Corner> = vec![start];
    let (mut prev, mut cur) = (start, first);
    let limit = 4 * w * h + 4;
    while cur != start {
        path.push(cur);
        if path.len() > limit {
            return Err(ShapeError::InvalidContour("boundary walk did not close".into()));
        }
        let options = outgoing
            .get(&cur)
            .ok_or_else(|| ShapeError::InvalidContour("open boundary".into()))?;
        let heading = (cur.0 - prev.0, cur.1 - prev.1);
        let next = if options.len() == 1 {
            options[0]
        } else {
            // Diagonal junction: take the right turn so the walk stays
            // around both pixels that touch at this corner.
            *options
                .iter()
                .find(|&&n| cross(heading, (n.0 - cur.0, n.1 - cur.1)) < 0)
                .unwrap_or(&options[0])
        };
        prev = cur;
        cur = next;
    }

    let n = path.len();
    let vertices: Vec<Point2> = (0..n)
        .filter(|&i| {
            let a = path[(i + n - 1) % n];
            let b = path[i];
            let c = path[(i + 1) % n];
            cross((b.0 - a.0, b.1 - a.1), (c.0 - b.0, c.1 - b.1)) != 0
        })
        .map(|i| Point2::new(path[i].0 as f64, path[i].1 as f64))
        .collect();
    Contour::new(vertices)
}

fn cross(a: (i64, i64), b: (i64, i64)) -> i64 {
    a.0 * b.1 - a.1 * b.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{iou, rasterize};

    #[test]
    fn single_pixel() {
        let m = BinaryMask::from_fn(5, 5, |x, y| x == 2 && y == 2);
        let cs = trace_contour(&m).unwrap();
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].len(), 4);
        assert_eq!(cs[0].signed_area(), 1.0);
    }

    #[test]
    fn two_blocks_two_contours() {
        let m = BinaryMask::from_fn(8, 4, |x, y| y < 2 && (x < 2 || (5..7).contains(&x)));
        let cs = trace_contour(&m).unwrap();
        assert_eq!(cs.len(), 2);
        assert!(cs.iter().all(|c| c.signed_area() == 4.0));
    }

    #[test]
    fn solid_square_round_trips() {
        let m = BinaryMask::from_fn(9, 9, |x, y| (2..7).contains(&x) && (2..7).contains(&y));
        let cs = trace_contour(&m).unwrap();
        assert_eq!(cs.len(), 1);
        let r = rasterize(&cs[0], 9, 9).unwrap();
        assert!(iou(&r.mask, &m).unwrap() >= 0.99);
        assert_eq!(r.mask, m);
    }

    #[test]
    fn diagonal_chain_is_one_loop() {
        let m = BinaryMask::from_fn(6, 6, |x, y| x == y || x == y + 1);
        let cs = trace_contour(&m).unwrap();
        assert_eq!(cs.len(), 1);
        assert_eq!(rasterize(&cs[0], 6, 6).unwrap().mask, m);
        let diag = BinaryMask::from_fn(4, 4, |x, y| x == y);
        let cs = trace_contour(&diag).unwrap();
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].signed_area(), 4.0);
        assert_eq!(rasterize(&cs[0], 4, 4).unwrap().mask, diag);
    }

    #[test]
    fn holes_are_dropped() {
        let ring = BinaryMask::from_fn(7, 7, |x, y| {
            (1..6).contains(&x) && (1..6).contains(&y) && !(x == 3 && y == 3)
        });
        let cs = trace_contour(&ring).unwrap();
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].signed_area(), 25.0);
    }

    #[test]
    fn empty_is_error() {
        assert!(matches!(
            trace_contour(&BinaryMask::zeros(3, 3)),
            Err(ShapeError::EmptyShape)
        ));
    }
}
