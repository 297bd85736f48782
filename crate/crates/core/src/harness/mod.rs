//! Running the pipeline over a dataset: configuration, per-image pipeline,
//! dataset discovery, parallel batch evaluation, reports and overlays.

pub mod batch;
pub mod config;
pub mod dataset;
pub mod overlay;
pub mod pipeline;
pub mod report;

pub use batch::{evaluate_predictions, run_batch, run_batch_with, BatchOptions, BatchOutcome, EvalRecord, ImageFailure};
pub use config::{DataTerm, ModelSpace, PipelineConfig};
pub use dataset::{load_dataset, load_predictions, Dataset, DatasetEntry, PredictionEntry};
pub use overlay::{render_overlay, render_overlay_with, OverlayStyle};
pub use pipeline::{image_seed, run_pipeline, run_pipeline_stages, PipelineStages};
pub use report::{summary_path, summarize, write_report, write_report_with, ReportOptions, Summary};
