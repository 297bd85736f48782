//! The per-image pipeline: border removal, enhancement, seeding, GrabCut.

use crate::enhance::enhance;
use crate::error::Result;
use crate::grabcut::{grabcut, SegmentationResult};
use crate::harness::config::{ModelSpace, PipelineConfig};
use crate::preprocess::remove_border;
use crate::raster::{render_planes, BinaryMask, HsvImage, RgbImage};
use crate::seed::{build_trimap, choose_init, extract_green_mask, InitMode, Trimap};

/// Intermediate products of one pipeline run, kept for inspection.
#[derive(Debug, Clone)]
pub struct PipelineStages {
    pub cleaned: RgbImage,
    pub enhanced: HsvImage,
    pub green_mask: BinaryMask,
    pub init: InitMode,
    pub trimap: Trimap,
    pub result: SegmentationResult,
}

/// Seed for one image: the configured seed mixed with a stable FNV-1a hash
/// of the image id, so results do not depend on processing order.
pub fn image_seed(seed: u64, image_id: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in image_id.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    seed ^ h
}

pub fn run_pipeline_stages(img: &RgbImage, cfg: &PipelineConfig) -> Result<PipelineStages> {
    cfg.validate()?;
    let cleaned = remove_border(img, cfg.dark_threshold).map_err(|e| e.context("border removal"))?;
    let enhanced = enhance(&cleaned, cfg).map_err(|e| e.context("enhancement"))?;
    let green_mask = extract_green_mask(&enhanced, cfg);
    let init = choose_init(&green_mask, cfg);
    let (w, h) = img.dims();
    let trimap = build_trimap(&init, w, h).map_err(|e| e.context("seeding"))?;
    let model_img = match cfg.model_space {
        ModelSpace::Enhanced => render_planes(&enhanced),
        ModelSpace::Raw => cleaned.clone(),
    };
    let mut result = grabcut(&model_img, &trimap, cfg, cfg.seed).map_err(|e| e.context("grabcut"))?;
    result.init_mode = Some(init.clone());
    Ok(PipelineStages {
        cleaned,
        enhanced,
        green_mask,
        init,
        trimap,
        result,
    })
}

/// Segments one dermoscopic image. The mask is `true` on the lesion.
pub fn run_pipeline(img: &RgbImage, cfg: &PipelineConfig) -> Result<SegmentationResult> {
    run_pipeline_stages(img, cfg).map(|s| s.result)
}
