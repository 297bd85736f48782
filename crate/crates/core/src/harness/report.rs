//! CSV report with a sibling `.summary.json`.
//!
//! Summary statistics are computed from the Jaccard values exactly as they
//! appear in the CSV (four decimals), so re-aggregating the CSV reproduces
//! the summary.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::batch::{BatchOutcome, ImageFailure};

pub const CSV_HEADER: [&str; 9] = [
    "image_id",
    "jaccard",
    "tp",
    "fp",
    "fn",
    "tn",
    "init_mode",
    "iterations",
    "runtime_ms",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReportOptions {
    /// When false the `runtime_ms` column is left empty, making reports of
    /// identical runs byte-identical.
    pub include_timing: bool,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self { include_timing: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JaccardStats {
    pub mean: f64,
    pub median: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub images_evaluated: usize,
    pub images_failed: usize,
    /// Complete image/mask pairs found before any limit.
    pub images_available: usize,
    pub jaccard: JaccardStats,
    pub init_modes: BTreeMap<String, usize>,
    pub failures: Vec<FailureEntry>,
    /// Images without ground truth.
    pub skipped: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureEntry {
    pub image_id: String,
    pub error: String,
}

impl From<&ImageFailure> for FailureEntry {
    fn from(f: &ImageFailure) -> Self {
        Self {
            image_id: f.image_id.clone(),
            error: f.error.clone(),
        }
    }
}

pub fn format_jaccard(j: f64) -> String {
    format!("{j:.4}")
}

fn reported(j: f64) -> f64 {
    format_jaccard(j).parse().expect("formatted float parses")
}

/// Mean, median, min and max of `values`, which must be non-empty.
pub fn jaccard_stats(values: &[f64]) -> Result<JaccardStats> {
    let mean = crate::metrics::mean_jaccard(values)?;
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    };
    Ok(JaccardStats {
        mean,
        median,
        min: sorted[0],
        max: sorted[n - 1],
    })
}

pub fn summarize(outcome: &BatchOutcome) -> Result<Summary> {
    let values: Vec<f64> = outcome.records.iter().map(|r| reported(r.jaccard)).collect();
    let mut init_modes = BTreeMap::new();
    for r in &outcome.records {
        let key = r.init_mode.map_or("none", |k| k.as_str());
        *init_modes.entry(key.to_string()).or_insert(0) += 1;
    }
    Ok(Summary {
        images_evaluated: outcome.records.len(),
        images_failed: outcome.failures.len(),
        images_available: outcome.available,
        jaccard: jaccard_stats(&values)?,
        init_modes,
        failures: outcome.failures.iter().map(FailureEntry::from).collect(),
        skipped: outcome.skipped.clone(),
    })
}

/// `report.csv` -> `report.summary.json`.
pub fn summary_path(report: &Path) -> PathBuf {
    report.with_extension("summary.json")
}

pub fn write_report_with(outcome: &BatchOutcome, path: impl AsRef<Path>, opts: &ReportOptions) -> Result<Summary> {
    let path = path.as_ref();
    if outcome.records.is_empty() {
        return Err(Error::EmptyList.context("no successful images to report"));
    }
    let summary = summarize(outcome)?;
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(CSV_HEADER)?;
    for r in &outcome.records {
        let c = &r.counts;
        w.write_record([
            r.image_id.clone(),
            format_jaccard(r.jaccard),
            c.tp.to_string(),
            c.fp.to_string(),
            c.fn_.to_string(),
            c.tn.to_string(),
            r.init_mode.map_or("none", |k| k.as_str()).to_string(),
            r.iterations.to_string(),
            if opts.include_timing { r.runtime_ms.to_string() } else { String::new() },
        ])?;
    }
    w.flush()?;
    let json = serde_json::to_string_pretty(&summary)?;
    std::fs::write(summary_path(path), json + "\n")?;
    Ok(summary)
}

pub fn write_report(outcome: &BatchOutcome, path: impl AsRef<Path>) -> Result<Summary> {
    write_report_with(outcome, path, &ReportOptions::default())
}
