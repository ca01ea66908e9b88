//! Binary PPM (P6) and PFM codecs.
//!
//! P6 with maxval < 256 decodes to an [`EncodedImage`] rescaled to
//! `[0, 255]`; 16-bit P6 and PFM decode to a [`LinearImage`]. PFM is
//! written little-endian (scale `-1.0`), bottom row first.

use std::fs;
use std::path::Path;

use super::{EncodedImage, ImageView, LinearImage, Raster, CHANNELS};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum AnyImage {
    Encoded(EncodedImage),
    Linear(LinearImage),
}

impl AnyImage {
    pub fn raster(&self) -> &Raster {
        match self {
            AnyImage::Encoded(e) => e.raster(),
            AnyImage::Linear(l) => l.raster(),
        }
    }

    pub fn into_linear(self) -> Option<LinearImage> {
        match self {
            AnyImage::Linear(l) => Some(l),
            AnyImage::Encoded(_) => None,
        }
    }

    pub fn into_encoded(self) -> Option<EncodedImage> {
        match self {
            AnyImage::Encoded(e) => Some(e),
            AnyImage::Linear(_) => None,
        }
    }
}

pub fn read_image(path: impl AsRef<Path>) -> Result<AnyImage> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes)
}

pub fn write_image(img: &AnyImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = match img {
        AnyImage::Encoded(e) => encode_ppm(e),
        AnyImage::Linear(l) => encode_pfm(l),
    };
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// 8-bit P6; samples are rounded to the nearest level.
pub fn encode_ppm(img: &EncodedImage) -> Vec<u8> {
    let r = img.raster();
    let mut out = format!("P6\n{} {}\n255\n", r.width(), r.height()).into_bytes();
    out.extend(r.data().iter().map(|v| v.round() as u8));
    out
}

pub fn encode_pfm(img: &LinearImage) -> Vec<u8> {
    let r = img.raster();
    let (w, h) = (r.width(), r.height());
    let mut out = format!("PF\n{w} {h}\n-1.0\n").into_bytes();
    out.reserve(w * h * CHANNELS * 4);
    for y in (0..h).rev() {
        let row = &r.data()[y * w * CHANNELS..(y + 1) * w * CHANNELS];
        for &v in row {
            out.extend_from_slice(&(v as f32).to_le_bytes());
        }
    }
    out
}

pub fn decode(bytes: &[u8]) -> Result<AnyImage> {
    let mut hdr = Header::new(bytes);
    let (magic, at) = hdr.token()?;
    match magic {
        b"P6" => decode_ppm(&mut hdr),
        b"PF" => decode_pfm(&mut hdr, 3),
        b"Pf" => decode_pfm(&mut hdr, 1),
        other => Err(Error::Parse {
            offset: at,
            message: format!(
                "unsupported magic {:?}, expected P6, PF or Pf",
                String::from_utf8_lossy(other)
            ),
        }),
    }
}

fn decode_ppm(hdr: &mut Header<'_>) -> Result<AnyImage> {
    let width = hdr.dimension("width")?;
    let height = hdr.dimension("height")?;
    let (maxval, at) = hdr.integer("maxval")?;
    if !(1..=65535).contains(&maxval) {
        return Err(Error::Parse {
            offset: at,
            message: format!("maxval {maxval} outside 1..=65535"),
        });
    }
    let payload = hdr.payload()?;
    let samples = width * height * CHANNELS;
    if maxval < 256 {
        let data = take(payload, samples)?;
        let scale = 255.0 / maxval as f64;
        let values = data
            .iter()
            .map(|&b| (b as f64 * scale).min(255.0))
            .collect();
        let raster = Raster::new(width, height, values)?;
        Ok(AnyImage::Encoded(EncodedImage::new(raster)?))
    } else {
        let data = take(payload, samples * 2)?;
        let values = data
            .chunks_exact(2)
            .map(|b| u16::from_be_bytes([b[0], b[1]]) as f64)
            .collect();
        Ok(AnyImage::Linear(LinearImage::new(Raster::new(
            width, height, values,
        )?)?))
    }
}

fn decode_pfm(hdr: &mut Header<'_>, channels: usize) -> Result<AnyImage> {
    let width = hdr.dimension("width")?;
    let height = hdr.dimension("height")?;
    let (tok, at) = hdr.token()?;
    let scale: f64 = std::str::from_utf8(tok)
        .ok()
        .and_then(|s| s.parse().ok())
        .filter(|s: &f64| *s != 0.0 && s.is_finite())
        .ok_or_else(|| Error::Parse {
            offset: at,
            message: "scale must be a nonzero number".into(),
        })?;
    let little_endian = scale < 0.0;
    let payload = hdr.payload()?;
    let data = take(payload, width * height * channels * 4)?;
    let row_len = width * channels;
    let mut values = vec![0.0; width * height * CHANNELS];
    for (file_row, chunk) in data.chunks_exact(row_len * 4).enumerate() {
        let y = height - 1 - file_row;
        for (i, b) in chunk.chunks_exact(4).enumerate() {
            let raw = [b[0], b[1], b[2], b[3]];
            let v = if little_endian {
                f32::from_le_bytes(raw)
            } else {
                f32::from_be_bytes(raw)
            } as f64;
            let x = i / channels;
            let base = (y * width + x) * CHANNELS;
            if channels == CHANNELS {
                values[base + i % channels] = v;
            } else {
                values[base..base + CHANNELS].fill(v);
            }
        }
    }
    Ok(AnyImage::Linear(LinearImage::new(Raster::new(
        width, height, values,
    )?)?))
}

fn take(payload: &[u8], expected: usize) -> Result<&[u8]> {
    payload.get(..expected).ok_or(Error::Truncated {
        expected,
        actual: payload.len(),
    })
}

/// Whitespace/comment-aware header tokenizer over the raw file bytes.
struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Header<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    fn skip_space(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while self.bytes.get(self.pos).is_some_and(|&b| b != b'\n') {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Result<(&'a [u8], usize)> {
        self.skip_space();
        let start = self.pos;
        while self
            .bytes
            .get(self.pos)
            .is_some_and(|b| !b.is_ascii_whitespace())
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::Parse {
                offset: start,
                message: "unexpected end of header".into(),
            });
        }
        Ok((&self.bytes[start..self.pos], start))
    }

    fn integer(&mut self, what: &str) -> Result<(usize, usize)> {
        let (tok, at) = self.token()?;
        let value = std::str::from_utf8(tok)
            .ok()
            .filter(|s| s.bytes().all(|b| b.is_ascii_digit()))
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse {
                offset: at,
                message: format!("{what} is not a decimal integer"),
            })?;
        Ok((value, at))
    }

    fn dimension(&mut self, what: &str) -> Result<usize> {
        let (v, at) = self.integer(what)?;
        if v == 0 {
            return Err(Error::Parse {
                offset: at,
                message: format!("{what} must be positive"),
            });
        }
        Ok(v)
    }

    /// Consumes the single whitespace byte that ends the header.
    fn payload(&mut self) -> Result<&'a [u8]> {
        match self.bytes.get(self.pos) {
            Some(b) if b.is_ascii_whitespace() => Ok(&self.bytes[self.pos + 1..]),
            _ => Err(Error::Parse {
                offset: self.pos,
                message: "missing whitespace before pixel data".into(),
            }),
        }
    }
}
