use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed image header at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("truncated image payload: expected {expected} bytes, found {actual}")]
    Truncated { expected: usize, actual: usize },

    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("region {x0},{y0} {w}x{h} does not fit inside a {width}x{height} image")]
    RoiOutOfBounds {
        x0: usize,
        y0: usize,
        w: usize,
        h: usize,
        width: usize,
        height: usize,
    },

    #[error("degenerate intensity bounds: i_min = i_max = {0}")]
    DegenerateBounds(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("channel {channel} has zero mean, gray-world scaling is undefined")]
    ZeroMeanChannel { channel: usize },

    #[error("sample sets measure different attributes ({0} vs {1})")]
    AttributeMismatch(String, String),

    #[error("sample set `{label}` is invalid: {reason}")]
    InvalidSampleSet { label: String, reason: String },

    #[error(
        "no samples for pair `{pair}` ({attribute}, model `{model}`): missing target `{target}`"
    )]
    MissingSampleSet {
        model: String,
        attribute: String,
        pair: String,
        target: String,
    },

    #[error("empty sample collection")]
    EmptySamples,

    #[error("config error: {0}")]
    Config(String),

    #[error("csv error in {path}: {message}")]
    Csv { path: PathBuf, message: String },

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// Tags an error with the pipeline stage that produced it.
    pub fn in_stage(self, stage: &'static str) -> Self {
        match self {
            e @ Error::Stage { .. } => e,
            e => Error::Stage {
                stage,
                source: Box::new(e),
            },
        }
    }
}
