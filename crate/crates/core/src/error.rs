use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected:?}, got {actual:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        actual: (usize, usize),
    },

    #[error("invalid raster: {0}")]
    InvalidRaster(String),

    #[error("mask covers every pixel, nothing to inpaint from")]
    FullyMaskedImage,

    #[error("k-means cluster count must be at least 1")]
    InvalidK,

    #[error("tile grid {cols}x{rows} is too fine for a {width}x{height} plane")]
    TileTooSmall {
        cols: usize,
        rows: usize,
        width: usize,
        height: usize,
    },

    #[error("invalid seed: {0}")]
    InvalidSeed(String),

    #[error("cannot fit a mixture to an empty pixel set")]
    EmptyPixelSet,

    #[error("{0} class has no pixels")]
    DegenerateClass(&'static str),

    #[error("cannot average an empty list")]
    EmptyList,

    #[error("no images found in {}", .0.display())]
    NoImagesFound(PathBuf),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Image(#[from] image::ImageError),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// The innermost error, with any context layers peeled off.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            other => other,
        }
    }

    /// True for failures that come from the filesystem or codecs rather than the algorithms.
    pub fn is_io(&self) -> bool {
        matches!(
            self.root(),
            Error::Io(_) | Error::Image(_) | Error::Csv(_) | Error::NoImagesFound(_)
        )
    }
}
