//! Light-intensity encoders: adaptive logarithm, Naka-Rushton and linear.
//!
//! Every encoder maps a channel's `[i_min, i_max]` onto `[0, 255]` and clamps
//! outside it. Bounds are estimated per channel from robust order statistics
//! (see [`compute_bounds`]). Outputs stay real-valued; quantization happens
//! only at export.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::imagecore::{EncodedImage, ImageView, LinearImage, Raster, LEVEL_MAX};

/// Offset used by [`pure_log_encode`] to keep `log2(0)` finite.
pub const PURE_LOG_EPSILON: f64 = 1e-12;

/// Gain of [`pure_log_encode`], levels per octave.
pub const PURE_LOG_GAIN: f64 = 32.0;

/// Histogram tail excluded at each end is `n_t / TAIL_DIVISOR` pixels.
const TAIL_DIVISOR: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntensityBounds {
    pub i_min: f64,
    pub i_max: f64,
}

impl IntensityBounds {
    pub fn new(i_min: f64, i_max: f64) -> Result<Self> {
        if !(i_min.is_finite() && i_max.is_finite()) || i_min < 0.0 {
            return Err(Error::param(format!(
                "intensity bounds must be finite and nonnegative: [{i_min}, {i_max}]"
            )));
        }
        if i_min == i_max {
            return Err(Error::DegenerateBounds(i_min));
        }
        if i_min > i_max {
            return Err(Error::param(format!("i_min {i_min} exceeds i_max {i_max}")));
        }
        Ok(Self { i_min, i_max })
    }

    pub fn range(&self) -> f64 {
        self.i_max - self.i_min
    }
}

/// Robust per-channel bounds from the cumulative histogram.
///
/// With `n_t = values.len()`, `i_min` is the smallest `v` such that more than
/// `n_t / 256` samples are `<= v`, and `i_max` the smallest `v` such that more
/// than `n_t - n_t / 256` samples are `<= v`. For real-valued data these are
/// the order statistics of (1-based) rank `floor(n_t/256) + 1` and
/// `floor(n_t - n_t/256) + 1`. The upper rank is capped at `n_t` so that
/// images with 256 pixels or fewer still get their extremes.
pub fn compute_bounds(values: &[f64]) -> Result<IntensityBounds> {
    let n = values.len();
    if n == 0 {
        return Err(Error::param("cannot estimate bounds of an empty channel"));
    }
    let (lo_rank, hi_rank) = bound_ranks(n);
    let mut scratch = values.to_vec();
    let i_min = *scratch
        .select_nth_unstable_by(lo_rank - 1, f64::total_cmp)
        .1;
    let i_max = *scratch
        .select_nth_unstable_by(hi_rank - 1, f64::total_cmp)
        .1;
    IntensityBounds::new(i_min, i_max)
}

/// 1-based ranks of the lower and upper bound order statistics.
pub fn bound_ranks(n_t: usize) -> (usize, usize) {
    let tail_floor = n_t / TAIL_DIVISOR;
    let tail_ceil = n_t.div_ceil(TAIL_DIVISOR);
    // floor(n - n/256) == n - ceil(n/256)
    let lo = tail_floor + 1;
    let hi = (n_t - tail_ceil + 1).min(n_t);
    (lo, hi)
}

pub fn channel_bounds<I: ImageView + ?Sized>(img: &I) -> Result<[IntensityBounds; 3]> {
    let r = img.raster();
    let b = [
        compute_bounds(&r.channel(0))?,
        compute_bounds(&r.channel(1))?,
        compute_bounds(&r.channel(2))?,
    ];
    Ok(b)
}

/// Median of each channel; the mean of the two middle values for even counts.
pub fn channel_medians<I: ImageView + ?Sized>(img: &I) -> [f64; 3] {
    let r = img.raster();
    [0, 1, 2].map(|c| median(&mut r.channel(c)))
}

fn median(values: &mut [f64]) -> f64 {
    let n = values.len();
    let upper = *values.select_nth_unstable_by(n / 2, f64::total_cmp).1;
    if n % 2 == 1 {
        upper
    } else {
        let lower = values[..n / 2]
            .iter()
            .copied()
            .max_by(f64::total_cmp)
            .unwrap_or(upper);
        0.5 * (lower + upper)
    }
}

/// Parameters of `L = beta * (log2(I - alpha) - gamma)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogParams {
    pub gamma: f64,
    pub alpha: f64,
    pub beta: f64,
    bounds: IntensityBounds,
    knee: f64,
}

impl LogParams {
    pub fn new(gamma: f64, bounds: IntensityBounds) -> Result<Self> {
        let knee = gamma.exp2();
        if !gamma.is_finite() || !knee.is_finite() || knee <= 0.0 {
            return Err(Error::param(format!("gamma {gamma} is out of range")));
        }
        let alpha = bounds.i_min - knee;
        let span = octaves_above_knee(bounds.range(), knee);
        if !(span > 0.0) {
            return Err(Error::param(format!(
                "gamma {gamma} leaves no dynamic range for [{}, {}]",
                bounds.i_min, bounds.i_max
            )));
        }
        Ok(Self {
            gamma,
            alpha,
            beta: LEVEL_MAX / span,
            bounds,
            knee,
        })
    }

    /// `log2(I - alpha) - gamma` is evaluated as `log2(1 + (I - i_min) / 2^gamma)`,
    /// which is the same quantity without cancellation near `i_min`.
    pub fn apply(&self, intensity: f64) -> f64 {
        let u = intensity.clamp(self.bounds.i_min, self.bounds.i_max) - self.bounds.i_min;
        (self.beta * octaves_above_knee(u, self.knee)).clamp(0.0, LEVEL_MAX)
    }
}

fn octaves_above_knee(u: f64, knee: f64) -> f64 {
    (u / knee).ln_1p() / LN_2
}

/// Naka-Rushton response with exponent 1, normalized so that `i_max -> 255`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NrParams {
    pub i_h: f64,
    pub v_m: f64,
    bounds: IntensityBounds,
}

impl NrParams {
    /// Exponent of the response curve; only 1 is supported.
    pub const N: f64 = 1.0;

    pub fn new(bounds: IntensityBounds, i_h: f64) -> Result<Self> {
        if !(i_h > 0.0) || !i_h.is_finite() {
            return Err(Error::param(format!(
                "semi-saturation intensity must be positive, got {i_h}"
            )));
        }
        let range = bounds.range();
        Ok(Self {
            i_h,
            v_m: LEVEL_MAX * (range + i_h) / range,
            bounds,
        })
    }

    pub fn apply(&self, intensity: f64) -> f64 {
        if intensity < self.bounds.i_min {
            0.0
        } else if intensity > self.bounds.i_max {
            LEVEL_MAX
        } else {
            let u = intensity - self.bounds.i_min;
            (self.v_m * u / (u + self.i_h)).min(LEVEL_MAX)
        }
    }
}

pub fn linear_level(intensity: f64, bounds: &IntensityBounds) -> f64 {
    let u = intensity.clamp(bounds.i_min, bounds.i_max) - bounds.i_min;
    (LEVEL_MAX * u / bounds.range()).clamp(0.0, LEVEL_MAX)
}

fn encode_with(img: &LinearImage, curves: [&dyn Fn(f64) -> f64; 3]) -> Result<EncodedImage> {
    let out = img.raster().map_channels(|c, v| curves[c](v))?;
    EncodedImage::new(out)
}

pub fn log_encode(
    img: &LinearImage,
    gamma: f64,
    bounds: &[IntensityBounds; 3],
) -> Result<EncodedImage> {
    let p = [
        LogParams::new(gamma, bounds[0])?,
        LogParams::new(gamma, bounds[1])?,
        LogParams::new(gamma, bounds[2])?,
    ];
    encode_with(
        img,
        [&|v| p[0].apply(v), &|v| p[1].apply(v), &|v| p[2].apply(v)],
    )
}

pub fn nr_encode(
    img: &LinearImage,
    bounds: &[IntensityBounds; 3],
    i_h: &[f64; 3],
) -> Result<EncodedImage> {
    let p = [
        NrParams::new(bounds[0], i_h[0])?,
        NrParams::new(bounds[1], i_h[1])?,
        NrParams::new(bounds[2], i_h[2])?,
    ];
    encode_with(
        img,
        [&|v| p[0].apply(v), &|v| p[1].apply(v), &|v| p[2].apply(v)],
    )
}

pub fn linear_encode(img: &LinearImage, bounds: &[IntensityBounds; 3]) -> Result<EncodedImage> {
    encode_with(
        img,
        [
            &|v| linear_level(v, &bounds[0]),
            &|v| linear_level(v, &bounds[1]),
            &|v| linear_level(v, &bounds[2]),
        ],
    )
}

/// Non-adaptive `32 * log2(I + eps)`.
///
/// Turns a per-channel gain into an exact additive constant, so it is the
/// reference encoder for checking illumination cancellation. Its output is
/// not confined to `[0, 255]`.
pub fn pure_log_encode(img: &LinearImage) -> Raster {
    img.raster()
        .map(|v| PURE_LOG_GAIN * (v + PURE_LOG_EPSILON).log2())
        .expect("log of nonnegative finite radiance is finite")
}

/// Encoder selection with bounds and semi-saturation estimated from the frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Encoder {
    Log { gamma: f64 },
    NakaRushton,
    Linear,
}

impl Encoder {
    pub fn encode(&self, img: &LinearImage) -> Result<EncodedImage> {
        let bounds = channel_bounds(img)?;
        match *self {
            Encoder::Log { gamma } => log_encode(img, gamma, &bounds),
            Encoder::NakaRushton => nr_encode(img, &bounds, &channel_medians(img)),
            Encoder::Linear => linear_encode(img, &bounds),
        }
    }
}
