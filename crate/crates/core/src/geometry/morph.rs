use super::BinaryMask;

const NEIGHBORS8: [(i64, i64); 8] = [(-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)];

/// 8-connected component labels; background is 0 and components are
/// numbered from 1 in row-major order of their first pixel.
pub fn label_components(mask: &BinaryMask) -> (Vec<u32>, u32) {
    let (w, h) = (mask.width(), mask.height());
    let mut labels = vec![0u32; w * h];
    let mut next = 0u32;
    let mut stack = Vec::new();
    for start in 0..w * h {
        if !mask.bits()[start] || labels[start] != 0 {
            continue;
        }
        next += 1;
        labels[start] = next;
        stack.push(start);
        while let Some(i) = stack.pop() {
            let (x, y) = ((i % w) as i64, (i / w) as i64);
            for (dx, dy) in NEIGHBORS8 {
                let (nx, ny) = (x + dx, y + dy);
                if mask.get_signed(nx, ny) {
                    let j = ny as usize * w + nx as usize;
                    if labels[j] == 0 {
                        labels[j] = next;
                        stack.push(j);
                    }
                }
            }
        }
    }
    (labels, next)
}

pub fn component_count(mask: &BinaryMask) -> usize {
    label_components(mask).1 as usize
}

/// One round of 3×3 binary dilation clipped to the frame.
pub fn dilate(mask: &BinaryMask) -> BinaryMask {
    BinaryMask::from_fn(mask.width(), mask.height(), |x, y| {
        let (x, y) = (x as i64, y as i64);
        mask.get_signed(x, y) || NEIGHBORS8.iter().any(|(dx, dy)| mask.get_signed(x + dx, y + dy))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_pixels_are_connected() {
        let m = BinaryMask::from_fn(4, 4, |x, y| x == y);
        assert_eq!(component_count(&m), 1);
        let m = BinaryMask::from_fn(5, 1, |x, _| x % 2 == 0);
        assert_eq!(component_count(&m), 3);
    }

    #[test]
    fn dilation_grows_by_one() {
        let m = BinaryMask::from_fn(5, 5, |x, y| x == 2 && y == 2);
        let d = dilate(&m);
        assert_eq!(d.count(), 9);
        assert_eq!(d.bounding_box(), Some((1, 1, 3, 3)));
        let corner = BinaryMask::from_fn(3, 3, |x, y| x == 0 && y == 0);
        assert_eq!(dilate(&corner).count(), 4);
    }
}
