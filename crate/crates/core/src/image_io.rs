//! 8-bit grayscale rasters and their binary PGM (P5) encoding.

use std::fs;
use std::path::Path;

use crate::bench_harness::SplitMix64;
use crate::error::{Error, Result};

/// Row-major 8-bit grayscale image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if pixels.len() != width * height {
            return Err(Error::InvalidArgument(format!(
                "{} pixels cannot fill a {width}x{height} image",
                pixels.len()
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// Builds an image from nested rows; all rows must share a length.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.as_ref().len());
        let mut pixels = Vec::with_capacity(width * height);
        for row in rows {
            let row = row.as_ref();
            if row.len() != width {
                return Err(Error::InvalidArgument("ragged rows".into()));
            }
            pixels.extend_from_slice(row);
        }
        Self::new(width, height, pixels)
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

    pub fn pixels_mut(&mut self) -> &mut [u8] {
        &mut self.pixels
    }

    /// Pixel at 0-indexed (x, y).
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u8]> {
        self.pixels.chunks(self.width.max(1))
    }
}

struct HeaderCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl HeaderCursor<'_> {
    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn number(&mut self, field: &str) -> Result<u32> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::MalformedHeader(format!("missing {field}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::MalformedHeader(format!("{field} out of range")))
    }
}

pub fn read_pgm(bytes: &[u8]) -> Result<GrayImage> {
    if !bytes.starts_with(b"P5") {
        return Err(Error::BadMagic);
    }
    let mut cursor = HeaderCursor { bytes, pos: 2 };
    if !cursor.bytes.get(2).is_some_and(|b| b.is_ascii_whitespace() || *b == b'#') {
        return Err(Error::BadMagic);
    }
    let width = cursor.number("width")? as usize;
    let height = cursor.number("height")? as usize;
    let maxval = cursor.number("maxval")?;
    if maxval != 255 {
        return Err(Error::UnsupportedMaxval(maxval));
    }
    // Exactly one whitespace byte separates maxval from the raster.
    match bytes.get(cursor.pos) {
        Some(b) if b.is_ascii_whitespace() => cursor.pos += 1,
        Some(_) => {
            return Err(Error::MalformedHeader(
                "maxval not followed by whitespace".into(),
            ))
        }
        None => {
            return Err(Error::TruncatedRaster {
                expected: width * height,
                found: 0,
            })
        }
    }
    let expected = width
        .checked_mul(height)
        .ok_or_else(|| Error::MalformedHeader("dimensions overflow".into()))?;
    let raster = &bytes[cursor.pos..];
    if raster.len() < expected {
        return Err(Error::TruncatedRaster {
            expected,
            found: raster.len(),
        });
    }
    GrayImage::new(width, height, raster[..expected].to_vec())
}

/// Canonical form: `P5\n<w> <h>\n255\n` followed by the raster.
pub fn write_pgm(img: &GrayImage) -> Vec<u8> {
    let header = format!("P5\n{} {}\n255\n", img.width, img.height);
    let mut out = Vec::with_capacity(header.len() + img.pixels.len());
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(&img.pixels);
    out
}

pub fn read_pgm_file(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    read_pgm(&bytes)
}

pub fn write_pgm_file(path: impl AsRef<Path>, img: &GrayImage) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, write_pgm(img)).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthKind {
    /// (x + y) mod 256.
    Gradient,
    /// Top byte of successive SplitMix64 outputs.
    Noise,
    /// Every pixel equals the value mod 256.
    Constant,
}

impl SynthKind {
    pub fn name(self) -> &'static str {
        match self {
            SynthKind::Gradient => "gradient",
            SynthKind::Noise => "noise",
            SynthKind::Constant => "constant",
        }
    }
}

impl std::str::FromStr for SynthKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gradient" => Ok(SynthKind::Gradient),
            "noise" => Ok(SynthKind::Noise),
            "constant" => Ok(SynthKind::Constant),
            other => Err(Error::InvalidArgument(format!(
                "unknown synthetic image kind {other:?}"
            ))),
        }
    }
}

/// Square synthetic cover of side `n`. `param` is the noise seed or the
/// constant value; gradients ignore it.
pub fn synth_image(kind: SynthKind, n: usize, param: u64) -> GrayImage {
    let pixels = match kind {
        SynthKind::Gradient => (0..n * n).map(|i| ((i % n + i / n) % 256) as u8).collect(),
        SynthKind::Constant => vec![(param % 256) as u8; n * n],
        SynthKind::Noise => {
            let mut rng = SplitMix64::new(param);
            (0..n * n).map(|_| (rng.next_u64() >> 56) as u8).collect()
        }
    };
    GrayImage {
        width: n,
        height: n,
        pixels,
    }
}
