//! Gaussian filtering and difference-of-Gaussians.
//!
//! The reference path is a separable convolution with a sampled Gaussian
//! truncated at `ceil(3 sigma)` and renormalized to unit mass. Borders
//! replicate the edge pixel. The fast path ([`hdc_gaussian`]) pads the frame
//! by edge replication, builds a binomial pyramid, finishes the blur with a
//! small Gaussian on the coarsest level and interpolates back to full
//! resolution.

use crate::error::{Error, Result};
use crate::imagecore::{EncodedImage, ImageView, Raster, Response, RetinexOutput};

/// Default center and surround standard deviations, in pixels.
pub const SIGMA_CENTER: f64 = 1.057;
pub const SIGMA_SURROUND: f64 = 17.964;

/// 5-tap binomial generating kernel; unit mass, unit variance.
const BINOMIAL5: [f64; 5] = [1.0 / 16.0, 4.0 / 16.0, 6.0 / 16.0, 4.0 / 16.0, 1.0 / 16.0];

/// Coarsest pyramid level must still hold the generating kernel.
const MIN_LEVEL_EXTENT: usize = BINOMIAL5.len();

/// Residual blur on the coarsest level, in that level's pixels.
const MIN_RESIDUAL_SIGMA: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianSpec {
    pub sigma: f64,
    pub radius: usize,
}

impl GaussianSpec {
    pub fn new(sigma: f64) -> Result<Self> {
        Self::check_sigma(sigma)?;
        Ok(Self {
            sigma,
            radius: min_radius(sigma),
        })
    }

    pub fn with_radius(sigma: f64, radius: usize) -> Result<Self> {
        Self::check_sigma(sigma)?;
        if radius < min_radius(sigma) {
            return Err(Error::param(format!(
                "radius {radius} is below ceil(3 * {sigma})"
            )));
        }
        Ok(Self { sigma, radius })
    }

    fn check_sigma(sigma: f64) -> Result<()> {
        if sigma > 0.0 && sigma.is_finite() {
            Ok(())
        } else {
            Err(Error::param(format!("sigma must be positive, got {sigma}")))
        }
    }

    /// Normalized taps for offsets `-radius..=radius`.
    pub fn kernel(&self) -> Vec<f64> {
        let r = self.radius as isize;
        let denom = 2.0 * self.sigma * self.sigma;
        let mut k: Vec<f64> = (-r..=r)
            .map(|i| (-((i * i) as f64) / denom).exp())
            .collect();
        let sum: f64 = k.iter().sum();
        k.iter_mut().for_each(|w| *w /= sum);
        k
    }
}

fn min_radius(sigma: f64) -> usize {
    (3.0 * sigma).ceil() as usize
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FilterPath {
    #[default]
    Direct,
    Hdc,
}

impl std::str::FromStr for FilterPath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(FilterPath::Direct),
            "hdc" => Ok(FilterPath::Hdc),
            other => Err(Error::param(format!(
                "unknown filter path `{other}` (expected direct or hdc)"
            ))),
        }
    }
}

impl std::fmt::Display for FilterPath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FilterPath::Direct => "direct",
            FilterPath::Hdc => "hdc",
        })
    }
}

/// A single row-major plane.
struct Plane {
    w: usize,
    h: usize,
    v: Vec<f64>,
}

impl Plane {
    #[inline]
    fn at(&self, x: usize, y: usize) -> f64 {
        self.v[y * self.w + x]
    }
}

fn planes(r: &Raster) -> [Plane; 3] {
    [0, 1, 2].map(|c| Plane {
        w: r.width(),
        h: r.height(),
        v: r.channel(c),
    })
}

fn join(w: usize, h: usize, ps: [Plane; 3]) -> Raster {
    Raster::from_channels(w, h, ps.map(|p| p.v)).expect("filtered planes keep their shape")
}

/// Correlates every line of length `len` (stride `step` between samples,
/// `line_step` between lines) with a symmetric odd kernel, replicating edges.
fn correlate_lines(
    src: &[f64],
    lines: usize,
    len: usize,
    step: usize,
    line_step: usize,
    kernel: &[f64],
) -> Vec<f64> {
    let r = kernel.len() / 2;
    let mut dst = vec![0.0; src.len()];
    let mut padded = vec![0.0; len + 2 * r];
    for line in 0..lines {
        let base = line * line_step;
        for (i, slot) in padded.iter_mut().enumerate() {
            let j = i.saturating_sub(r).min(len - 1);
            *slot = src[base + j * step];
        }
        for i in 0..len {
            let window = &padded[i..i + kernel.len()];
            dst[base + i * step] = window.iter().zip(kernel).map(|(a, b)| a * b).sum();
        }
    }
    dst
}

fn separable(p: &Plane, kernel: &[f64]) -> Plane {
    let horiz = correlate_lines(&p.v, p.h, p.w, 1, p.w, kernel);
    let v = correlate_lines(&horiz, p.w, p.h, p.w, 1, kernel);
    Plane { w: p.w, h: p.h, v }
}

/// Direct separable Gaussian on an unconstrained raster.
pub fn gaussian_filter_raster(img: &Raster, spec: &GaussianSpec) -> Raster {
    let kernel = spec.kernel();
    let out = planes(img).map(|p| separable(&p, &kernel));
    join(img.width(), img.height(), out)
}

pub fn gaussian_filter(img: &EncodedImage, spec: &GaussianSpec) -> EncodedImage {
    EncodedImage::clamped(gaussian_filter_raster(img.raster(), spec))
}

/// Number of binomial reductions used for `sigma`: the deepest level at which
/// the remaining blur is still at least two coarse pixels wide.
pub fn pyramid_depth(sigma: f64) -> usize {
    let var = sigma * sigma;
    let mut depth = 0;
    loop {
        let next = depth + 1;
        let spacing = (1usize << next) as f64;
        let residual = var - pyramid_variance(next);
        if residual < (MIN_RESIDUAL_SIGMA * spacing).powi(2) {
            return depth;
        }
        depth = next;
    }
}

/// Variance, in full-resolution pixels, accumulated by `depth` binomial
/// reductions: `sum_{j<depth} 4^j`.
fn pyramid_variance(depth: usize) -> f64 {
    ((1u64 << (2 * depth)) - 1) as f64 / 3.0
}

fn reduce(p: &Plane) -> Plane {
    let blurred = separable(p, &BINOMIAL5);
    let (w, h) = (p.w.div_ceil(2), p.h.div_ceil(2));
    let mut v = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            v.push(blurred.at(2 * x, 2 * y));
        }
    }
    Plane { w, h, v }
}

/// Bilinear resampling of a level whose sample `i` sits at `i * scale`.
fn expand(coarse: &Plane, scale: usize, w: usize, h: usize) -> Plane {
    let axis = |n: usize, size: usize| -> Vec<(usize, usize, f64)> {
        (0..n)
            .map(|i| {
                let pos = i as f64 / scale as f64;
                let i0 = (pos.floor() as usize).min(size - 1);
                let i1 = (i0 + 1).min(size - 1);
                (i0, i1, pos - i0 as f64)
            })
            .collect()
    };
    let xs = axis(w, coarse.w);
    let ys = axis(h, coarse.h);
    let mut v = Vec::with_capacity(w * h);
    for &(y0, y1, fy) in &ys {
        let fy = if y0 == y1 { 0.0 } else { fy };
        for &(x0, x1, fx) in &xs {
            let fx = if x0 == x1 { 0.0 } else { fx };
            let top = coarse.at(x0, y0) * (1.0 - fx) + coarse.at(x1, y0) * fx;
            let bot = coarse.at(x0, y1) * (1.0 - fx) + coarse.at(x1, y1) * fx;
            v.push(top * (1.0 - fy) + bot * fy);
        }
    }
    Plane { w, h, v }
}

fn level_extent(n: usize, depth: usize) -> usize {
    (0..depth).fold(n, |m, _| m.div_ceil(2))
}

/// Pyramid (hierarchical discrete correlation) approximation of a Gaussian.
///
/// Falls back to [`gaussian_filter_raster`] when no reduction is useful for
/// `target_sigma` or when the coarsest level would be smaller than the
/// generating kernel.
pub fn hdc_gaussian_raster(img: &Raster, target_sigma: f64) -> Result<Raster> {
    if !(target_sigma >= 1.0) || !target_sigma.is_finite() {
        return Err(Error::param(format!(
            "pyramid filtering needs sigma >= 1, got {target_sigma}"
        )));
    }
    let depth = pyramid_depth(target_sigma);
    let (w, h) = (img.width(), img.height());
    if depth == 0
        || level_extent(w, depth) < MIN_LEVEL_EXTENT
        || level_extent(h, depth) < MIN_LEVEL_EXTENT
    {
        return Ok(gaussian_filter_raster(
            img,
            &GaussianSpec::new(target_sigma)?,
        ));
    }
    let scale = 1usize << depth;
    let residual = (target_sigma * target_sigma - pyramid_variance(depth)).sqrt() / scale as f64;
    let kernel = GaussianSpec::new(residual)?.kernel();
    // replicate the border out to the direct kernel's reach, on the coarse grid
    let pad = min_radius(target_sigma).next_multiple_of(scale);
    let out = planes(img).map(|p| {
        let padded = pad_replicate(&p, pad);
        let coarse = (0..depth).fold(padded, |level, _| reduce(&level));
        let smoothed = separable(&coarse, &kernel);
        let full = expand(&smoothed, scale, w + 2 * pad, h + 2 * pad);
        crop(&full, pad, w, h)
    });
    Ok(join(w, h, out))
}

fn pad_replicate(p: &Plane, pad: usize) -> Plane {
    let (w, h) = (p.w + 2 * pad, p.h + 2 * pad);
    let mut v = Vec::with_capacity(w * h);
    for y in 0..h {
        let sy = y.saturating_sub(pad).min(p.h - 1);
        for x in 0..w {
            v.push(p.at(x.saturating_sub(pad).min(p.w - 1), sy));
        }
    }
    Plane { w, h, v }
}

fn crop(p: &Plane, offset: usize, w: usize, h: usize) -> Plane {
    let mut v = Vec::with_capacity(w * h);
    for y in 0..h {
        let row = (y + offset) * p.w + offset;
        v.extend_from_slice(&p.v[row..row + w]);
    }
    Plane { w, h, v }
}

pub fn hdc_gaussian(img: &EncodedImage, target_sigma: f64) -> Result<EncodedImage> {
    Ok(EncodedImage::clamped(hdc_gaussian_raster(
        img.raster(),
        target_sigma,
    )?))
}

/// Gaussian blur along the requested path. The pyramid path only engages for
/// `sigma >= 1`; smaller blurs always use direct filtering.
pub fn blur(img: &Raster, sigma: f64, path: FilterPath) -> Result<Raster> {
    match path {
        FilterPath::Hdc if sigma >= 1.0 => hdc_gaussian_raster(img, sigma),
        _ => Ok(gaussian_filter_raster(img, &GaussianSpec::new(sigma)?)),
    }
}

/// Center blur, surround blur and their difference.
#[derive(Clone, Debug)]
pub struct DogStages {
    pub center: Raster,
    pub surround: Raster,
    pub difference: Raster,
}

pub fn dog_stages(img: &Raster, sigma1: f64, sigma2: f64, path: FilterPath) -> Result<DogStages> {
    if !(sigma1 < sigma2) {
        return Err(Error::param(format!(
            "center sigma {sigma1} must be smaller than surround sigma {sigma2}"
        )));
    }
    let center = blur(img, sigma1, path)?;
    let surround = blur(img, sigma2, path)?;
    let diff = center
        .data()
        .iter()
        .zip(surround.data())
        .map(|(a, b)| a - b)
        .collect();
    let difference = Raster::new(img.width(), img.height(), diff)?;
    Ok(DogStages {
        center,
        surround,
        difference,
    })
}

pub fn dog_raster(img: &Raster, sigma1: f64, sigma2: f64, path: FilterPath) -> Result<Raster> {
    Ok(dog_stages(img, sigma1, sigma2, path)?.difference)
}

/// `g(sigma1) * img - g(sigma2) * img`.
pub fn dog(
    img: &EncodedImage,
    sigma1: f64,
    sigma2: f64,
    path: FilterPath,
) -> Result<RetinexOutput> {
    Ok(RetinexOutput::new(
        dog_raster(img.raster(), sigma1, sigma2, path)?,
        Response::Signed,
    ))
}
