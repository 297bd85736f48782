//! Automatic skin-lesion segmentation for dermoscopic images.
//!
//! The pipeline removes dark vignette borders, quantizes and contrast
//! enhances the image in HSV, seeds GrabCut from a color-rule mask (or a
//! centered rectangle when that mask is unreliable) and scores the result
//! against ground truth with the Jaccard index.
//!
//! ```no_run
//! use lesionseg::{io, run_pipeline, PipelineConfig};
//! let img = io::load_rgb("ISIC_0000000.jpg")?;
//! let result = run_pipeline(&img, &PipelineConfig::default())?;
//! io::save_mask(&result.mask, "ISIC_0000000_pred.png")?;
//! # Ok::<(), lesionseg::Error>(())
//! ```

pub mod cluster;
pub mod enhance;
pub mod error;
pub mod grabcut;
pub mod harness;
pub mod io;
pub mod metrics;
pub mod preprocess;
pub mod raster;
pub mod seed;
pub mod synth;

pub use enhance::{clahe, enhance, kmeans_quantize, Palette};
pub use error::{Error, Result};
pub use grabcut::{grabcut, SegmentationResult};
pub use harness::{
    load_dataset, render_overlay, run_batch, run_pipeline, write_report, BatchOutcome, DataTerm, EvalRecord,
    ModelSpace, PipelineConfig,
};
pub use metrics::{confusion, jaccard, mean_jaccard, ConfusionCounts};
pub use preprocess::{detect_dark_border, inpaint, remove_border};
pub use raster::{BinaryMask, ChannelPlane, Hsv, HsvImage, Rgb, RgbImage};
pub use seed::{InitKind, InitMode, Rect, Trimap, TrimapLabel};
