//! Mask file formats: binary PBM (P4) read/write and PNG read.

use std::io::Write;
use std::path::Path;

use super::BinaryMask;
use crate::error::{Result, ShapeError};

/// Encodes a mask as P4. Foreground pixels are written as 1 (black).
pub fn encode_pbm(mask: &BinaryMask) -> Vec<u8> {
    let (w, h) = (mask.width(), mask.height());
    let row_bytes = w.div_ceil(8);
    let mut out = format!("P4\n{w} {h}\n").into_bytes();
    out.reserve(row_bytes * h);
    for y in 0..h {
        let mut row = vec![0u8; row_bytes];
        for x in 0..w {
            if mask.get(x, y) {
                row[x / 8] |= 0x80 >> (x % 8);
            }
        }
        out.extend_from_slice(&row);
    }
    out
}

pub fn decode_pbm(data: &[u8]) -> Result<BinaryMask> {
    let err = |message: &str| ShapeError::Parse {
        context: "PBM".into(),
        message: message.into(),
    };
    if data.len() < 2 || &data[..2] != b"P4" {
        return Err(err("missing P4 magic number"));
    }
    let mut pos = 2;
    let mut header = [0usize; 2];
    for field in header.iter_mut() {
        // whitespace and comments
        loop {
            match data.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while data.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                _ => break,
            }
        }
        let start = pos;
        while data.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err(err("expected image dimension"));
        }
        *field = std::str::from_utf8(&data[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| err("image dimension out of range"))?;
    }
    match data.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(err("expected single whitespace after header")),
    }
    let [w, h] = header;
    if w == 0 || h == 0 {
        return Err(err("image dimensions must be positive"));
    }
    let row_bytes = w.div_ceil(8);
    let raster = &data[pos..];
    if raster.len() < row_bytes * h {
        return Err(err("truncated raster"));
    }
    Ok(BinaryMask::from_fn(w, h, |x, y| {
        raster[y * row_bytes + x / 8] & (0x80 >> (x % 8)) != 0
    }))
}

pub fn write_pbm(path: impl AsRef<Path>, mask: &BinaryMask) -> Result<()> {
    let path = path.as_ref();
    let mut file = std::fs::File::create(path).map_err(|e| ShapeError::io(path, e))?;
    file.write_all(&encode_pbm(mask)).map_err(|e| ShapeError::io(path, e))
}

pub fn read_pbm(path: impl AsRef<Path>) -> Result<BinaryMask> {
    let path = path.as_ref();
    let data = std::fs::read(path).map_err(|e| ShapeError::io(path, e))?;
    decode_pbm(&data)
}

/// Reads a PBM or PNG mask, sniffing the format from the file contents.
/// PNG pixels with luma ≥ 128 are foreground.
pub fn read_mask(path: impl AsRef<Path>) -> Result<BinaryMask> {
    let path = path.as_ref();
    let data = std::fs::read(path).map_err(|e| ShapeError::io(path, e))?;
    if data.starts_with(b"P4") {
        return decode_pbm(&data);
    }
    let img = image::load_from_memory(&data)
        .map_err(|e| ShapeError::Parse {
            context: path.display().to_string(),
            message: e.to_string(),
        })?
        .into_luma8();
    let (w, h) = (img.width() as usize, img.height() as usize);
    BinaryMask::new(w, h, img.pixels().map(|p| p.0[0] >= 128).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pbm_layout_is_bit_exact() {
        let m = BinaryMask::from_fn(10, 2, |x, y| (x + y) % 3 == 0);
        let bytes = encode_pbm(&m);
        assert_eq!(&bytes[..8], b"P4\n10 2\n");
        // row 0: x = 0,3,6,9 -> 1001_0010 01xx_xxxx
        assert_eq!(&bytes[8..], &[0b1001_0010, 0b0100_0000, 0b0010_0100, 0b1000_0000]);
        assert_eq!(decode_pbm(&bytes).unwrap(), m);
    }

    #[test]
    fn pbm_header_comments() {
        let data = b"P4\n# made by hand\n3 1\n\xa0";
        let m = decode_pbm(data).unwrap();
        assert_eq!(m.bits(), &[true, false, true]);
    }

    #[test]
    fn pbm_errors() {
        assert!(decode_pbm(b"P1\n1 1\n1").is_err());
        assert!(decode_pbm(b"P4\n8 2\n\xff").is_err());
        assert!(decode_pbm(b"P4\n0 2\n").is_err());
    }

    #[test]
    fn png_masks_threshold_luma() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.png");
        let img = image::GrayImage::from_fn(3, 2, |x, _| image::Luma([if x == 1 { 255 } else { 0 }]));
        img.save(&path).unwrap();
        let m = read_mask(&path).unwrap();
        assert_eq!(m, BinaryMask::from_fn(3, 2, |x, _| x == 1));
    }
}
