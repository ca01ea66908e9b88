//! End-to-end color-constancy models.
//!
//! Center/surround retinex encodes each channel (log, Naka-Rushton or linear)
//! and takes a difference of Gaussians; gray-world rescales each channel so
//! its mean is 128.

use std::fmt;
use std::str::FromStr;

use crate::encoding::{pure_log_encode, Encoder};
use crate::error::{Error, Result};
use crate::imagecore::{
    EncodedImage, ImageView, LinearImage, Raster, Response, RetinexOutput, LEVEL_MAX,
};
use crate::spatialfilter::{dog_stages, FilterPath, SIGMA_CENTER, SIGMA_SURROUND};

/// Gray-world target mean.
pub const GRAY_LEVEL: f64 = 128.0;

/// Display offset applied to signed model output.
pub const DISPLAY_OFFSET: f64 = 128.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ModelKind {
    LogRetinex { gamma: f64 },
    NrRetinex,
    LinearRetinex,
    GrayWorld,
}

impl ModelKind {
    fn encoder(&self) -> Option<Encoder> {
        match *self {
            ModelKind::LogRetinex { gamma } => Some(Encoder::Log { gamma }),
            ModelKind::NrRetinex => Some(Encoder::NakaRushton),
            ModelKind::LinearRetinex => Some(Encoder::Linear),
            ModelKind::GrayWorld => None,
        }
    }
}

/// Labels are `log:<gamma>`, `nr`, `linear` and `gw`.
impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelKind::LogRetinex { gamma } => write!(f, "log:{gamma}"),
            ModelKind::NrRetinex => f.write_str("nr"),
            ModelKind::LinearRetinex => f.write_str("linear"),
            ModelKind::GrayWorld => f.write_str("gw"),
        }
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "nr" => return Ok(ModelKind::NrRetinex),
            "linear" => return Ok(ModelKind::LinearRetinex),
            "gw" => return Ok(ModelKind::GrayWorld),
            _ => {}
        }
        let gamma = s
            .strip_prefix("log:")
            .and_then(|g| g.parse::<f64>().ok())
            .filter(|g| g.is_finite())
            .ok_or_else(|| {
                Error::param(format!(
                    "unknown model `{s}` (expected log:<gamma>, nr, linear or gw)"
                ))
            })?;
        Ok(ModelKind::LogRetinex { gamma })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub sigma1: f64,
    pub sigma2: f64,
    pub filter: FilterPath,
}

impl ModelSpec {
    pub fn new(kind: ModelKind, sigma1: f64, sigma2: f64, filter: FilterPath) -> Result<Self> {
        if !(sigma1 > 0.0 && sigma1 < sigma2 && sigma2.is_finite()) {
            return Err(Error::param(format!(
                "need 0 < sigma1 < sigma2, got ({sigma1}, {sigma2})"
            )));
        }
        Ok(Self {
            kind,
            sigma1,
            sigma2,
            filter,
        })
    }

    /// Model with the default center/surround pair and direct filtering.
    pub fn with_defaults(kind: ModelKind) -> Self {
        Self {
            kind,
            sigma1: SIGMA_CENTER,
            sigma2: SIGMA_SURROUND,
            filter: FilterPath::Direct,
        }
    }

    pub fn label(&self) -> String {
        self.kind.to_string()
    }
}

/// Intermediate images of one retinex evaluation: encoded input, center and
/// surround blurs, and their difference.
#[derive(Clone, Debug)]
pub struct RetinexStages {
    pub encoded: EncodedImage,
    pub center: Raster,
    pub surround: Raster,
    pub output: RetinexOutput,
}

pub fn run_cs_retinex_stages(img: &LinearImage, spec: &ModelSpec) -> Result<RetinexStages> {
    let encoder = spec
        .kind
        .encoder()
        .ok_or_else(|| Error::param(format!("`{}` is not a center/surround model", spec.kind)))?;
    let encoded = encoder.encode(img)?;
    let stages = dog_stages(encoded.raster(), spec.sigma1, spec.sigma2, spec.filter)?;
    Ok(RetinexStages {
        encoded,
        center: stages.center,
        surround: stages.surround,
        output: RetinexOutput::new(stages.difference, Response::Signed),
    })
}

pub fn run_cs_retinex(img: &LinearImage, spec: &ModelSpec) -> Result<RetinexOutput> {
    Ok(run_cs_retinex_stages(img, spec)?.output)
}

/// Retinex on the non-adaptive `32 log2(I)` encoding. A per-channel gain on
/// the input becomes an additive constant that the DoG removes.
pub fn run_pure_log_retinex(
    img: &LinearImage,
    sigma1: f64,
    sigma2: f64,
    filter: FilterPath,
) -> Result<RetinexOutput> {
    let encoded = pure_log_encode(img);
    let stages = dog_stages(&encoded, sigma1, sigma2, filter)?;
    Ok(RetinexOutput::new(stages.difference, Response::Signed))
}

/// `(128 / mean_c) * I_c` without clamping.
pub fn gray_world_unclamped(img: &LinearImage) -> Result<Raster> {
    let means = img.raster().channel_means();
    if let Some(channel) = means.iter().position(|&m| !(m > 0.0)) {
        return Err(Error::ZeroMeanChannel { channel });
    }
    let gain = means.map(|m| GRAY_LEVEL / m);
    img.raster().map_channels(|c, v| gain[c] * v)
}

pub fn run_gray_world(img: &LinearImage) -> Result<RetinexOutput> {
    let out = gray_world_unclamped(img)?.map(|v| v.clamp(0.0, LEVEL_MAX))?;
    Ok(RetinexOutput::new(out, Response::Unsigned))
}

pub fn run_model(img: &LinearImage, spec: &ModelSpec) -> Result<RetinexOutput> {
    match spec.kind {
        ModelKind::GrayWorld => run_gray_world(img),
        _ => run_cs_retinex(img, spec),
    }
}

/// Maps model output onto `[0, 255]`: signed responses are offset by 128 and
/// clamped; gray-world output passes through.
pub fn to_display(x: &RetinexOutput) -> EncodedImage {
    let offset = match x.response() {
        Response::Signed => DISPLAY_OFFSET,
        Response::Unsigned => 0.0,
    };
    let shifted = x
        .raster()
        .map(|v| v + offset)
        .expect("offset of finite samples is finite");
    EncodedImage::clamped(shifted)
}
