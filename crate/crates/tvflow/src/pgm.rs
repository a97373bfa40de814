//! 8-bit grayscale PGM input/output (binary `P5` and ASCII `P2`).
//!
//! Intensities are promoted to `f64` on load; the spatial step defaults to
//! `1 / max(rows, cols)`, placing the image in a unit-length domain. On
//! write, values are clamped to `[0, 255]` and rounded half away from
//! zero. The writer emits the canonical header `P5\n<w> <h>\n255\n`, so
//! canonical files round-trip byte for byte.

use std::fs;
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::grid::ImageGrid;

/// Default spatial step for an image: unit domain along its longer side.
pub fn default_h(rows: usize, cols: usize) -> f64 {
    1.0 / rows.max(cols) as f64
}

struct Tokenizer<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Tokenizer<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    /// Next whitespace-separated token, skipping `#` comments.
    fn token(&mut self) -> Result<&'a [u8]> {
        loop {
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.pos >= self.bytes.len() {
                return Err(Error::ImageFormat("unexpected end of header".into()));
            }
            if self.bytes[self.pos] == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
                continue;
            }
            let start = self.pos;
            while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            return Ok(&self.bytes[start..self.pos]);
        }
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        let tok = self.token()?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::ImageFormat(format!("bad {what} field in header")))
    }
}

/// Parses a P5 or P2 PGM byte buffer.
pub fn parse(bytes: &[u8]) -> Result<ImageGrid> {
    let mut tok = Tokenizer::new(bytes);
    let magic = tok.token()?;
    let binary = match magic {
        b"P5" => true,
        b"P2" => false,
        other => {
            return Err(Error::ImageFormat(format!(
                "unsupported magic {:?}, expected P5 or P2",
                String::from_utf8_lossy(other)
            )))
        }
    };
    let cols = tok.number("width")?;
    let rows = tok.number("height")?;
    let maxval = tok.number("maxval")?;
    if maxval != 255 {
        return Err(Error::ImageFormat(format!(
            "unsupported maxval {maxval}, only 255 is accepted"
        )));
    }
    if rows < 2 || cols < 2 {
        return Err(Error::ImageFormat(format!(
            "image must be at least 2x2, got {rows}x{cols}"
        )));
    }

    let mut values = Array2::zeros((rows, cols));
    if binary {
        // exactly one whitespace byte separates the header from the raster
        let data_start = tok.pos + 1;
        let expected = rows * cols;
        let data = bytes
            .get(data_start..data_start + expected)
            .ok_or_else(|| Error::ImageFormat("truncated P5 raster".into()))?;
        for (p, &byte) in data.iter().enumerate() {
            values[(p / cols, p % cols)] = byte as f64;
        }
    } else {
        for i in 0..rows {
            for j in 0..cols {
                let v = tok.number("pixel")?;
                if v > 255 {
                    return Err(Error::ImageFormat(format!(
                        "pixel value {v} exceeds maxval 255"
                    )));
                }
                values[(i, j)] = v as f64;
            }
        }
    }
    ImageGrid::new(values, default_h(rows, cols))
}

/// Encodes as canonical binary P5.
pub fn to_p5_bytes(u: &ImageGrid) -> Vec<u8> {
    let header = format!("P5\n{} {}\n255\n", u.cols(), u.rows());
    let mut out = header.into_bytes();
    out.extend(
        u.as_slice()
            .iter()
            .map(|&v| v.clamp(0.0, 255.0).round() as u8),
    );
    out
}

/// Loads a PGM file; spatial step defaults to `1 / max(rows, cols)`.
pub fn load_image<P: AsRef<Path>>(path: P) -> Result<ImageGrid> {
    let bytes = fs::read(path.as_ref())
        .map_err(|e| Error::ImageFormat(format!("cannot read {}: {e}", path.as_ref().display())))?;
    parse(&bytes)
}

/// Writes `u` as binary P5, clamping to `[0, 255]` and rounding half away
/// from zero.
pub fn write_image<P: AsRef<Path>>(u: &ImageGrid, path: P) -> Result<()> {
    fs::write(path, to_p5_bytes(u))?;
    Ok(())
}
