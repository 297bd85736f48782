//! Parallel evaluation of a dataset.

use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::harness::config::PipelineConfig;
use crate::harness::dataset::{Dataset, DatasetEntry, PredictionEntry};
use crate::harness::pipeline::{image_seed, run_pipeline};
use crate::io::{load_mask, load_rgb, save_mask};
use crate::metrics::{confusion, jaccard, ConfusionCounts};
use crate::seed::InitKind;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalRecord {
    pub image_id: String,
    pub jaccard: f64,
    pub counts: ConfusionCounts,
    /// `None` when scoring precomputed masks.
    pub init_mode: Option<InitKind>,
    pub iterations: usize,
    pub runtime_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ImageFailure {
    pub image_id: String,
    pub error: String,
}

#[derive(Debug, Clone, Default)]
pub struct BatchOutcome {
    /// Sorted by id.
    pub records: Vec<EvalRecord>,
    /// Sorted by id.
    pub failures: Vec<ImageFailure>,
    pub skipped: Vec<String>,
    /// Complete pairs found before any limit.
    pub available: usize,
}

#[derive(Debug, Clone)]
pub struct BatchOptions {
    pub workers: usize,
    /// Where to write `<id>.png` predicted masks, if anywhere.
    pub mask_dir: Option<PathBuf>,
}

impl Default for BatchOptions {
    fn default() -> Self {
        Self {
            workers: 1,
            mask_dir: None,
        }
    }
}

fn evaluate_entry(entry: &DatasetEntry, cfg: &PipelineConfig, opts: &BatchOptions) -> Result<EvalRecord> {
    let start = Instant::now();
    let img = load_rgb(&entry.image)?;
    let gt = load_mask(&entry.ground_truth)?;
    gt.check_dims(img.dims())?;
    let cfg = PipelineConfig {
        seed: image_seed(cfg.seed, &entry.id),
        ..cfg.clone()
    };
    let result = run_pipeline(&img, &cfg)?;
    let counts = confusion(&result.mask, &gt)?;
    if let Some(dir) = &opts.mask_dir {
        save_mask(&result.mask, dir.join(format!("{}.png", entry.id)))?;
    }
    Ok(EvalRecord {
        image_id: entry.id.clone(),
        jaccard: jaccard(&counts),
        counts,
        init_mode: result.init_mode.map(|m| m.kind()),
        iterations: result.iterations_run,
        runtime_ms: start.elapsed().as_millis() as u64,
    })
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    if workers == 0 {
        return Err(Error::InvalidConfig("workers must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))
}

fn split<T>(ids: Vec<(String, Result<T>)>) -> (Vec<T>, Vec<ImageFailure>) {
    let mut ok = Vec::new();
    let mut failed = Vec::new();
    for (id, r) in ids {
        match r {
            Ok(v) => ok.push(v),
            Err(e) => failed.push(ImageFailure {
                image_id: id,
                error: e.to_string(),
            }),
        }
    }
    (ok, failed)
}

/// Segments and scores every entry. Per-image failures are collected rather
/// than aborting the run; output order is by id whatever the worker count.
pub fn run_batch_with(dataset: &Dataset, cfg: &PipelineConfig, opts: &BatchOptions) -> Result<BatchOutcome> {
    cfg.validate()?;
    if let Some(dir) = &opts.mask_dir {
        std::fs::create_dir_all(dir)?;
    }
    let results: Vec<(String, Result<EvalRecord>)> = pool(opts.workers)?.install(|| {
        dataset
            .entries
            .par_iter()
            .map(|e| {
                let r = evaluate_entry(e, cfg, opts).map_err(|err| err.context(e.id.clone()));
                (e.id.clone(), r)
            })
            .collect()
    });
    let (records, failures) = split(results);
    Ok(BatchOutcome {
        records,
        failures,
        skipped: dataset.skipped.clone(),
        available: dataset.available,
    })
}

pub fn run_batch(dataset: &Dataset, cfg: &PipelineConfig, workers: usize) -> Result<BatchOutcome> {
    run_batch_with(
        dataset,
        cfg,
        &BatchOptions {
            workers,
            mask_dir: None,
        },
    )
}

/// Scores precomputed masks against ground truth.
pub fn evaluate_predictions(pairs: &[PredictionEntry], skipped: Vec<String>) -> BatchOutcome {
    let results: Vec<(String, Result<EvalRecord>)> = pairs
        .par_iter()
        .map(|p| {
            let r = (|| {
                let pred = load_mask(&p.prediction)?;
                let gt = load_mask(&p.ground_truth)?;
                let counts = confusion(&pred, &gt)?;
                Ok(EvalRecord {
                    image_id: p.id.clone(),
                    jaccard: jaccard(&counts),
                    counts,
                    init_mode: None,
                    iterations: 0,
                    runtime_ms: 0,
                })
            })();
            (p.id.clone(), r.map_err(|e: Error| e.context(p.id.clone())))
        })
        .collect();
    let (records, failures) = split(results);
    BatchOutcome {
        available: pairs.len(),
        records,
        failures,
        skipped,
    }
}
