//! Dataset discovery: pairs `<id>.jpg|.jpeg|.png` images with
//! `<id>_segmentation.png` ground-truth masks.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

const GT_SUFFIX: &str = "_segmentation";
const IMAGE_EXTENSIONS: [&str; 3] = ["jpg", "jpeg", "png"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetEntry {
    pub id: String,
    pub image: PathBuf,
    pub ground_truth: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Dataset {
    /// Sorted by id.
    pub entries: Vec<DatasetEntry>,
    /// Ids of images without a ground-truth mask.
    pub skipped: Vec<String>,
    /// Number of complete pairs before any limit was applied.
    pub available: usize,
}

impl Dataset {
    /// Keeps the first `n` entries in id order.
    pub fn limit(mut self, n: usize) -> Self {
        self.entries.truncate(n);
        self
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn has_extension(path: &Path, allowed: &[&str]) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| allowed.iter().any(|a| a.eq_ignore_ascii_case(e)))
}

fn sorted_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let rd = std::fs::read_dir(dir).map_err(|e| Error::from(e).context(format!("reading {}", dir.display())))?;
    let mut files = Vec::new();
    for entry in rd {
        let path = entry?.path();
        if path.is_file() {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

fn stem(path: &Path) -> Option<&str> {
    path.file_stem().and_then(|s| s.to_str())
}

/// Scans `images_dir` for images and looks up each one's mask in `gt_dir`.
/// Files in `images_dir` whose stem has a `_` suffix such as
/// `_segmentation` or `_superpixels` are not treated as images.
pub fn load_dataset(images_dir: impl AsRef<Path>, gt_dir: impl AsRef<Path>) -> Result<Dataset> {
    let images_dir = images_dir.as_ref();
    let gt_dir = gt_dir.as_ref();
    let mut images: BTreeMap<String, PathBuf> = BTreeMap::new();
    for path in sorted_files(images_dir)? {
        let Some(id) = stem(&path) else { continue };
        if !has_extension(&path, &IMAGE_EXTENSIONS) || id.ends_with(GT_SUFFIX) || id.ends_with("_superpixels") {
            continue;
        }
        // first extension in sorted order wins when an id appears twice
        images.entry(id.to_string()).or_insert(path);
    }
    if images.is_empty() {
        return Err(Error::NoImagesFound(images_dir.to_path_buf()));
    }
    let mut ds = Dataset::default();
    for (id, image) in images {
        let gt = gt_dir.join(format!("{id}{GT_SUFFIX}.png"));
        if gt.is_file() {
            ds.entries.push(DatasetEntry {
                id,
                image,
                ground_truth: gt,
            });
        } else {
            ds.skipped.push(id);
        }
    }
    ds.available = ds.entries.len();
    Ok(ds)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictionEntry {
    pub id: String,
    pub prediction: PathBuf,
    pub ground_truth: PathBuf,
}

/// Pairs predicted masks named `<id>.png` or `<id>_segmentation.png` with
/// ground truth. Returns the pairs and the ids without ground truth.
pub fn load_predictions(pred_dir: impl AsRef<Path>, gt_dir: impl AsRef<Path>) -> Result<(Vec<PredictionEntry>, Vec<String>)> {
    let pred_dir = pred_dir.as_ref();
    let mut preds: BTreeMap<String, PathBuf> = BTreeMap::new();
    for path in sorted_files(pred_dir)? {
        if !has_extension(&path, &["png"]) {
            continue;
        }
        let Some(s) = stem(&path) else { continue };
        let id = s.strip_suffix(GT_SUFFIX).unwrap_or(s);
        preds.entry(id.to_string()).or_insert(path);
    }
    if preds.is_empty() {
        return Err(Error::NoImagesFound(pred_dir.to_path_buf()));
    }
    let mut pairs = Vec::new();
    let mut skipped = Vec::new();
    for (id, prediction) in preds {
        let gt = gt_dir.as_ref().join(format!("{id}{GT_SUFFIX}.png"));
        if gt.is_file() {
            pairs.push(PredictionEntry {
                id,
                prediction,
                ground_truth: gt,
            });
        } else {
            skipped.push(id);
        }
    }
    Ok((pairs, skipped))
}
