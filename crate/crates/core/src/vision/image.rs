use std::fs;
use std::io::Write;
use std::path::Path;

use super::VisionError;
use crate::geometry::ImagePoint;

/// Row-major 8-bit grayscale raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize) -> Self {
        Self::filled(width, height, 0)
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        Self {
            width,
            height,
            pixels: vec![value; width * height],
        }
    }

    pub fn from_raw(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self, VisionError> {
        if pixels.len() != width * height {
            return Err(VisionError::DimensionMismatch {
                expected: width * height,
                actual: pixels.len(),
            });
        }
        Ok(Self { width, height, pixels })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        let mut pixels = Vec::with_capacity(width * height);
        for v in 0..height {
            for h in 0..width {
                pixels.push(f(h, v));
            }
        }
        Self { width, height, pixels }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, h: usize, v: usize) -> u8 {
        self.pixels[v * self.width + h]
    }

    #[inline]
    pub fn set(&mut self, h: usize, v: usize, value: u8) {
        self.pixels[v * self.width + h] = value;
    }

    pub fn count_nonzero(&self) -> usize {
        self.pixels.iter().filter(|&&p| p != 0).count()
    }

    /// Mirror about the vertical centerline.
    pub fn flip_horizontal(&self) -> Self {
        Self::from_fn(self.width, self.height, |h, v| self.get(self.width - 1 - h, v))
    }

    /// Draws a straight segment with unit-step sampling along the major axis.
    pub fn draw_segment(&mut self, a: ImagePoint, b: ImagePoint, value: u8) {
        let steps = (b.h - a.h).abs().max((b.v - a.v).abs()).ceil().max(1.0) as usize;
        for i in 0..=steps {
            let t = i as f64 / steps as f64;
            let h = (a.h + (b.h - a.h) * t).round();
            let v = (a.v + (b.v - a.v) * t).round();
            if h >= 0.0 && v >= 0.0 && (h as usize) < self.width && (v as usize) < self.height {
                self.set(h as usize, v as usize, value);
            }
        }
    }

    /// Binary P5 encoding with maxval 255.
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }

    pub fn from_pgm(bytes: &[u8]) -> Result<Self, VisionError> {
        let mut cursor = PgmCursor { bytes, pos: 0 };
        if cursor.bytes.get(0..2) != Some(b"P5") {
            return Err(VisionError::Pgm("missing P5 magic".into()));
        }
        cursor.pos = 2;
        let width = cursor.header_number("width")?;
        let height = cursor.header_number("height")?;
        let maxval = cursor.header_number("maxval")?;
        if maxval == 0 || maxval > 255 {
            return Err(VisionError::Pgm(format!(
                "unsupported maxval {maxval}, only 8-bit images are handled"
            )));
        }
        if width == 0 || height == 0 {
            return Err(VisionError::Pgm("zero image dimension".into()));
        }
        // exactly one whitespace byte separates the header from the raster
        match cursor.bytes.get(cursor.pos) {
            Some(c) if c.is_ascii_whitespace() => cursor.pos += 1,
            _ => return Err(VisionError::Pgm("missing raster separator".into())),
        }
        let len = width
            .checked_mul(height)
            .ok_or_else(|| VisionError::Pgm("image dimensions overflow".into()))?;
        let raster = cursor
            .bytes
            .get(cursor.pos..cursor.pos + len)
            .ok_or_else(|| VisionError::Pgm(format!("truncated raster, expected {len} bytes")))?;
        Ok(Self {
            width,
            height,
            pixels: raster.to_vec(),
        })
    }

    pub fn read_pgm(path: &Path) -> Result<Self, VisionError> {
        let bytes = fs::read(path).map_err(|e| VisionError::Io(format!("{}: {e}", path.display())))?;
        Self::from_pgm(&bytes)
    }

    pub fn write_pgm(&self, path: &Path) -> Result<(), VisionError> {
        let mut f = fs::File::create(path).map_err(|e| VisionError::Io(format!("{}: {e}", path.display())))?;
        f.write_all(&self.to_pgm())
            .map_err(|e| VisionError::Io(format!("{}: {e}", path.display())))
    }
}

struct PgmCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl PgmCursor<'_> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&c) = self.bytes.get(self.pos) {
            if c.is_ascii_whitespace() {
                self.pos += 1;
            } else if c == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn header_number(&mut self, what: &str) -> Result<usize, VisionError> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(VisionError::Pgm(format!("expected {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| VisionError::Pgm(format!("invalid {what}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm_bytes_are_canonical() {
        let img = GrayImage::from_fn(3, 2, |h, v| (h * 10 + v) as u8);
        let bytes = img.to_pgm();
        assert_eq!(&bytes[..11], b"P5\n3 2\n255\n");
        assert_eq!(&bytes[11..], &[0, 10, 20, 1, 11, 21]);
        assert_eq!(GrayImage::from_pgm(&bytes).unwrap(), img);
    }

    #[test]
    fn pgm_header_with_comments() {
        let mut bytes = b"P5 # made by hand\n2 # w\n1\n255\n".to_vec();
        bytes.extend_from_slice(&[7, 9]);
        let img = GrayImage::from_pgm(&bytes).unwrap();
        assert_eq!((img.width(), img.height(), img.pixels()), (2, 1, &[7u8, 9][..]));
    }

    #[test]
    fn pgm_rejects_corrupt_input() {
        assert!(GrayImage::from_pgm(b"P2\n1 1\n255\n0").is_err());
        assert!(GrayImage::from_pgm(b"P5\nx 1\n255\n0").is_err());
        assert!(GrayImage::from_pgm(b"P5\n4 4\n255\n0").is_err());
        assert!(GrayImage::from_pgm(b"P5\n1 1\n65535\n00").is_err());
        assert!(GrayImage::from_pgm(b"").is_err());
    }

    #[test]
    fn from_raw_checks_length() {
        assert!(GrayImage::from_raw(2, 2, vec![0; 3]).is_err());
    }
}
