//! Retina-inspired color constancy.
//!
//! Center/surround retinex with logarithmic, Naka-Rushton or linear intensity
//! encoding, a gray-world baseline, HSV and double-opponent color
//! representations, Fisher-criterion scoring, and a synthetic darkroom that
//! renders targets under 17 illumination conditions.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ccmodels;
pub mod colorspace;
pub mod encoding;
pub mod error;
pub mod imagecore;
pub mod metrics;
pub mod pipeline;
pub mod scenesim;
pub mod spatialfilter;

pub use error::{Error, Result};
