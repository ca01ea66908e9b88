//! Image containers shared by every stage of the pipeline.
//!
//! All images are three-channel, interleaved R,G,B, row-major, with `f64`
//! samples in memory. The wrappers differ only in the value range they
//! guarantee:
//!
//! - [`LinearImage`]: nonnegative radiance (the merged HDR signal).
//! - [`EncodedImage`]: values in `[0, 255]` after intensity encoding.
//! - [`RetinexOutput`]: signed center/surround response.
//!
//! Every image is immutable once built.

mod codec;

pub use codec::{decode, encode_pfm, encode_ppm, read_image, write_image, AnyImage};

use crate::error::{Error, Result};

pub const CHANNELS: usize = 3;

/// Upper end of the 8-bit display range.
pub const LEVEL_MAX: f64 = 255.0;

/// Untyped three-channel raster. Only guarantees finite samples.
#[derive(Clone, Debug, PartialEq)]
pub struct Raster {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Raster {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!(
                "empty image ({width}x{height})"
            )));
        }
        let expected = width
            .checked_mul(height)
            .and_then(|n| n.checked_mul(CHANNELS))
            .ok_or_else(|| Error::InvalidImage("image dimensions overflow".into()))?;
        if data.len() != expected {
            return Err(Error::InvalidImage(format!(
                "{width}x{height} image needs {expected} samples, got {}",
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidImage(format!(
                "non-finite sample at index {i}"
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height * CHANNELS);
        for y in 0..height {
            for x in 0..width {
                for c in 0..CHANNELS {
                    data.push(f(x, y, c));
                }
            }
        }
        Self::new(width, height, data)
    }

    pub fn filled(width: usize, height: usize, value: [f64; 3]) -> Result<Self> {
        Self::from_fn(width, height, |_, _, c| value[c])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    /// Interleaved samples, `(y * width + x) * 3 + c`.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, c: usize) -> f64 {
        self.data[(y * self.width + x) * CHANNELS + c]
    }

    pub fn pixel(&self, x: usize, y: usize) -> [f64; 3] {
        let i = (y * self.width + x) * CHANNELS;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    /// One channel as a contiguous row-major plane.
    pub fn channel(&self, c: usize) -> Vec<f64> {
        self.data
            .iter()
            .skip(c)
            .step_by(CHANNELS)
            .copied()
            .collect()
    }

    /// Rebuilds an interleaved raster from three planes.
    pub fn from_channels(width: usize, height: usize, planes: [Vec<f64>; 3]) -> Result<Self> {
        let n = width * height;
        if planes.iter().any(|p| p.len() != n) {
            return Err(Error::InvalidImage(
                "channel planes have mismatched sizes".into(),
            ));
        }
        let mut data = Vec::with_capacity(n * CHANNELS);
        for i in 0..n {
            for plane in &planes {
                data.push(plane[i]);
            }
        }
        Self::new(width, height, data)
    }

    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Result<Self> {
        Self::new(
            self.width,
            self.height,
            self.data.iter().map(|&v| f(v)).collect(),
        )
    }

    /// Applies a per-channel function; `f(c, v)`.
    pub fn map_channels(&self, mut f: impl FnMut(usize, f64) -> f64) -> Result<Self> {
        let data = self
            .data
            .iter()
            .enumerate()
            .map(|(i, &v)| f(i % CHANNELS, v))
            .collect();
        Self::new(self.width, self.height, data)
    }

    /// Left-right mirror image.
    pub fn mirrored(&self) -> Self {
        let w = self.width;
        let mut data = Vec::with_capacity(self.data.len());
        for y in 0..self.height {
            for x in (0..w).rev() {
                data.extend_from_slice(&self.pixel(x, y));
            }
        }
        Self {
            width: w,
            height: self.height,
            data,
        }
    }

    pub fn channel_means(&self) -> [f64; 3] {
        let mut sums = [0.0; 3];
        for px in self.data.chunks_exact(CHANNELS) {
            for c in 0..CHANNELS {
                sums[c] += px[c];
            }
        }
        let n = self.pixel_count() as f64;
        sums.map(|s| s / n)
    }
}

/// Read access shared by the typed image wrappers.
pub trait ImageView {
    fn raster(&self) -> &Raster;

    fn width(&self) -> usize {
        self.raster().width()
    }

    fn height(&self) -> usize {
        self.raster().height()
    }
}

impl ImageView for Raster {
    fn raster(&self) -> &Raster {
        self
    }
}

/// Nonnegative linear radiance, `I = E * rho`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearImage(Raster);

impl LinearImage {
    pub fn new(raster: Raster) -> Result<Self> {
        if let Some(i) = raster.data.iter().position(|&v| v < 0.0) {
            return Err(Error::InvalidImage(format!(
                "negative radiance {} at index {i}",
                raster.data[i]
            )));
        }
        Ok(Self(raster))
    }

    pub fn into_raster(self) -> Raster {
        self.0
    }

    /// Per-channel gain, `I'_c = gain_c * I_c`.
    pub fn scaled(&self, gain: [f64; 3]) -> Result<Self> {
        if gain.iter().any(|g| !(*g >= 0.0) || !g.is_finite()) {
            return Err(Error::param(format!(
                "gain must be finite and nonnegative: {gain:?}"
            )));
        }
        Self::new(self.0.map_channels(|c, v| v * gain[c])?)
    }
}

impl ImageView for LinearImage {
    fn raster(&self) -> &Raster {
        &self.0
    }
}

/// Encoded intensity, every sample in `[0, 255]`.
#[derive(Clone, Debug, PartialEq)]
pub struct EncodedImage(Raster);

impl EncodedImage {
    pub fn new(raster: Raster) -> Result<Self> {
        if let Some(i) = raster
            .data
            .iter()
            .position(|&v| !(0.0..=LEVEL_MAX).contains(&v))
        {
            return Err(Error::InvalidImage(format!(
                "encoded sample {} at index {i} is outside [0, 255]",
                raster.data[i]
            )));
        }
        Ok(Self(raster))
    }

    /// Wraps a raster after clamping every sample into `[0, 255]`.
    pub fn clamped(raster: Raster) -> Self {
        let Raster {
            width,
            height,
            mut data,
        } = raster;
        for v in &mut data {
            *v = v.clamp(0.0, LEVEL_MAX);
        }
        Self(Raster {
            width,
            height,
            data,
        })
    }

    pub fn into_raster(self) -> Raster {
        self.0
    }
}

impl ImageView for EncodedImage {
    fn raster(&self) -> &Raster {
        &self.0
    }
}

/// How a model's output relates to the display range.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Response {
    /// Zero-centered difference signal (center/surround models).
    Signed,
    /// Already a `[0, 255]` image (gray-world).
    Unsigned,
}

/// Output `X` of a color-constancy model.
///
/// For DoG outputs of `[0, 255]` encodings, `|X| <= 255`.
#[derive(Clone, Debug, PartialEq)]
pub struct RetinexOutput {
    raster: Raster,
    response: Response,
}

impl RetinexOutput {
    pub fn new(raster: Raster, response: Response) -> Self {
        Self { raster, response }
    }

    pub fn response(&self) -> Response {
        self.response
    }

    pub fn into_raster(self) -> Raster {
        self.raster
    }
}

impl ImageView for RetinexOutput {
    fn raster(&self) -> &Raster {
        &self.raster
    }
}

/// Rectangular region of interest, top-left anchored.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Roi {
    pub x0: usize,
    pub y0: usize,
    pub w: usize,
    pub h: usize,
}

impl Roi {
    pub fn new(x0: usize, y0: usize, w: usize, h: usize) -> Self {
        Self { x0, y0, w, h }
    }

    /// A `size`x`size` square centered on `(cx, cy)`.
    pub fn centered(cx: usize, cy: usize, size: usize) -> Self {
        Self::new(cx - size / 2, cy - size / 2, size, size)
    }

    pub fn check(&self, width: usize, height: usize) -> Result<()> {
        let fits = self.w >= 1
            && self.h >= 1
            && self.x0.checked_add(self.w).is_some_and(|e| e <= width)
            && self.y0.checked_add(self.h).is_some_and(|e| e <= height);
        if fits {
            Ok(())
        } else {
            Err(Error::RoiOutOfBounds {
                x0: self.x0,
                y0: self.y0,
                w: self.w,
                h: self.h,
                width,
                height,
            })
        }
    }

    pub fn overlaps(&self, other: &Roi) -> bool {
        self.x0 < other.x0 + other.w
            && other.x0 < self.x0 + self.w
            && self.y0 < other.y0 + other.h
            && other.y0 < self.y0 + self.h
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        (self.x0..self.x0 + self.w).contains(&x) && (self.y0..self.y0 + self.h).contains(&y)
    }
}

/// Per-channel arithmetic mean over the pixels of `roi`.
pub fn roi_mean<I: ImageView + ?Sized>(img: &I, roi: &Roi) -> Result<[f64; 3]> {
    let r = img.raster();
    roi.check(r.width(), r.height())?;
    let mut sums = [0.0; 3];
    for y in roi.y0..roi.y0 + roi.h {
        for x in roi.x0..roi.x0 + roi.w {
            let p = r.pixel(x, y);
            for c in 0..CHANNELS {
                sums[c] += p[c];
            }
        }
    }
    let n = (roi.w * roi.h) as f64;
    Ok(sums.map(|s| s / n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn raster_rejects_bad_shapes() {
        assert!(Raster::new(0, 1, vec![]).is_err());
        assert!(Raster::new(2, 1, vec![0.0; 5]).is_err());
        assert!(Raster::new(1, 1, vec![0.0, f64::NAN, 0.0]).is_err());
    }

    #[test]
    fn typed_wrappers_enforce_ranges() {
        let neg = Raster::filled(1, 1, [-1.0, 0.0, 0.0]).unwrap();
        assert!(LinearImage::new(neg).is_err());
        let hot = Raster::filled(1, 1, [256.0, 0.0, 0.0]).unwrap();
        assert!(EncodedImage::new(hot.clone()).is_err());
        let e = EncodedImage::clamped(hot);
        assert_eq!(e.raster().pixel(0, 0), [255.0, 0.0, 0.0]);
    }

    #[test]
    fn roi_mean_of_uniform_field() {
        let img = Raster::filled(8, 6, [10.0, 20.0, 30.0]).unwrap();
        let m = roi_mean(&img, &Roi::new(2, 1, 3, 4)).unwrap();
        assert_eq!(m, [10.0, 20.0, 30.0]);
    }

    #[test]
    fn roi_mean_of_black_white_pair() {
        let img = Raster::new(2, 1, vec![0.0, 0.0, 0.0, 255.0, 255.0, 255.0]).unwrap();
        let m = roi_mean(&img, &Roi::new(0, 0, 2, 1)).unwrap();
        assert_eq!(m, [127.5, 127.5, 127.5]);
    }

    #[test]
    fn roi_mean_over_three_by_three() {
        let img = Raster::from_fn(5, 5, |x, y, c| (x + 5 * y + c) as f64).unwrap();
        let m = roi_mean(&img, &Roi::centered(2, 2, 3)).unwrap();
        // center pixel value equals the mean of a symmetric 3x3 window of a linear ramp
        assert_eq!(m, [12.0, 13.0, 14.0]);
    }

    #[test]
    fn roi_out_of_bounds() {
        let img = Raster::filled(4, 4, [0.0; 3]).unwrap();
        assert!(matches!(
            roi_mean(&img, &Roi::new(2, 2, 3, 1)),
            Err(Error::RoiOutOfBounds { .. })
        ));
        assert!(roi_mean(&img, &Roi::new(0, 0, 0, 1)).is_err());
    }

    #[test]
    fn mirror_is_an_involution() {
        let img = Raster::from_fn(5, 3, |x, y, c| (x * 7 + y * 3 + c) as f64).unwrap();
        assert_eq!(img.mirrored().pixel(0, 1), img.pixel(4, 1));
        assert_eq!(img.mirrored().mirrored(), img);
    }

    #[test]
    fn channels_round_trip() {
        let img = Raster::from_fn(3, 2, |x, y, c| (x + 10 * y + 100 * c) as f64).unwrap();
        let planes = [img.channel(0), img.channel(1), img.channel(2)];
        assert_eq!(Raster::from_channels(3, 2, planes).unwrap(), img);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn roi_mean_is_linear(
                vals in proptest::collection::vec(0.0f64..1000.0, 4 * 3 * 3),
                a in 0.0f64..50.0,
            ) {
                let img = Raster::new(4, 3, vals).unwrap();
                let roi = Roi::new(1, 0, 3, 2);
                let base = roi_mean(&img, &roi).unwrap();
                let scaled = roi_mean(&img.map(|v| a * v).unwrap(), &roi).unwrap();
                for c in 0..3 {
                    prop_assert!((scaled[c] - a * base[c]).abs() <= 1e-9 * (1.0 + a * base[c]));
                }
            }
        }
    }
}
