use std::fmt;

use thiserror::Error;

/// Pipeline stage, used to tag errors surfaced from [`crate::pipeline::run_pipeline`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    ImageCore,
    Sbd,
    Bayes,
    Refine,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Stage::ImageCore => "imagecore",
            Stage::Sbd => "sbd",
            Stage::Bayes => "bayes",
            Stage::Refine => "refine",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("image is {width}x{height}, both sides must be at least {min} pixels")]
    ImageTooSmall { width: usize, height: usize, min: usize },

    #[error("pixel buffer holds {actual} values, expected {expected}")]
    BufferSize { expected: usize, actual: usize },

    #[error("invalid scale ratio {0}, must lie in (0, 1]")]
    InvalidScale(f64),

    #[error("invalid patch size {size} for a {width}x{height} image (must be odd, >= 3 and fit the image)")]
    InvalidPatchSize { size: usize, width: usize, height: usize },

    #[error("border width {border} is too wide for a {width}x{height} image")]
    BorderTooWide { border: usize, width: usize, height: usize },

    #[error("a background model needs at least 2 patches, got {0}")]
    TooFewPatches(usize),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("map contains a non-finite value at index {0}")]
    NonFinite(usize),

    #[error("size mismatch: {0}x{1} vs {2}x{3}")]
    SizeMismatch(usize, usize, usize, usize),

    #[error("region {0} of the foreground split is empty")]
    EmptyRegion(&'static str),

    #[error("cannot fit {target} superpixels into a {width}x{height} image")]
    TooManySuperpixels { target: usize, width: usize, height: usize },

    #[error("ground truth has no foreground pixels")]
    EmptyGroundTruth,

    #[error("ground truth contains a single class")]
    SingleClassGroundTruth,

    #[error("nothing to aggregate")]
    EmptyAggregate,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Image(#[from] image::ImageError),
}

impl Error {
    pub(crate) fn in_stage(self, stage: Stage) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
