//! Color quantization, HSV conversion and per-channel CLAHE.

use std::collections::HashMap;

use crate::cluster::{color_histogram, kmeans, rgb_point};
use crate::error::{Error, Result};
use crate::harness::config::PipelineConfig;
use crate::raster::{merge_channels, rgb_to_hsv, split_channels, ChannelPlane, HsvImage, Rgb, RgbImage};

/// Centroid shift (per channel, 8-bit scale) below which Lloyd iterations stop.
pub const KMEANS_TOLERANCE: f64 = 0.5;

/// Distinct 8-bit colors an image was quantized to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Palette {
    pub centroids: Vec<Rgb>,
}

impl Palette {
    pub fn k(&self) -> usize {
        self.centroids.len()
    }
}

/// k-means color quantization in RGB. Seeding is k-means++ driven by `seed`;
/// every pixel is replaced by its nearest centroid rounded to 8 bits.
pub fn kmeans_quantize(img: &RgbImage, k: usize, seed: u64, max_iters: usize) -> Result<(RgbImage, Palette)> {
    if k == 0 {
        return Err(Error::InvalidK);
    }
    let hist = color_histogram(img.pixels().iter().copied());
    let points: Vec<_> = hist.iter().map(|(c, _)| rgb_point(*c)).collect();
    let weights: Vec<f64> = hist.iter().map(|(_, n)| *n as f64).collect();
    let km = kmeans(&points, &weights, k, seed, max_iters, KMEANS_TOLERANCE);

    let rounded: Vec<Rgb> = km
        .centroids
        .iter()
        .map(|c| c.map(|v| v.round().clamp(0.0, 255.0) as u8))
        .collect();
    let mut centroids = Vec::new();
    for (i, mass) in km.cluster_weights(&weights).into_iter().enumerate() {
        if mass > 0.0 && !centroids.contains(&rounded[i]) {
            centroids.push(rounded[i]);
        }
    }

    let lookup: HashMap<Rgb, Rgb> = hist
        .iter()
        .zip(&km.assignment)
        .map(|((c, _), &a)| (*c, rounded[a]))
        .collect();
    let data = img.pixels().iter().map(|p| lookup[p]).collect();
    Ok((RgbImage::new(img.width(), img.height(), data)?, Palette { centroids }))
}

fn tile_bounds(len: usize, tiles: usize) -> Vec<usize> {
    (0..=tiles).map(|i| i * len / tiles).collect()
}

/// Clips a histogram at `limit` and spreads the clipped excess evenly over
/// all 256 bins. Counts stay real-valued so the resulting mapping depends only
/// on the tile's normalized histogram, not on its pixel count.
fn clip_histogram(hist: &mut [f64; 256], limit: f64) {
    let mut excess = 0.0;
    for h in hist.iter_mut() {
        if *h > limit {
            excess += *h - limit;
            *h = limit;
        }
    }
    let share = excess / 256.0;
    for h in hist.iter_mut() {
        *h += share;
    }
}

/// Per-axis interpolation: for each coordinate, the two neighbouring tile
/// indices and the weight of the second.
fn axis_weights(bounds: &[usize]) -> Vec<(usize, usize, f64)> {
    let tiles = bounds.len() - 1;
    let len = bounds[tiles];
    let centers: Vec<f64> = (0..tiles)
        .map(|i| (bounds[i] + bounds[i + 1] - 1) as f64 / 2.0)
        .collect();
    (0..len)
        .map(|p| {
            let p = p as f64;
            if p <= centers[0] {
                return (0, 0, 0.0);
            }
            if p >= centers[tiles - 1] {
                return (tiles - 1, tiles - 1, 0.0);
            }
            let i = centers.partition_point(|&c| c <= p) - 1;
            let t = (p - centers[i]) / (centers[i + 1] - centers[i]);
            (i, i + 1, t)
        })
        .collect()
}

/// Contrast-limited adaptive histogram equalization on an 8-bit plane.
///
/// The plane is cut into a `cols x rows` grid. Each tile's 256-bin histogram
/// is clipped at `clip_limit * tile_pixels / 256`, its CDF gives
/// a lookup table, and each output pixel bilinearly blends the tables of the
/// four nearest tile centers.
pub fn clahe(plane: &ChannelPlane, clip_limit: f64, tile_grid: (usize, usize)) -> Result<ChannelPlane> {
    let (cols, rows) = tile_grid;
    let (w, h) = plane.dims();
    if cols == 0 || rows == 0 || cols > w || rows > h {
        return Err(Error::TileTooSmall {
            cols,
            rows,
            width: w,
            height: h,
        });
    }
    if clip_limit.is_nan() || clip_limit < 1.0 {
        return Err(Error::InvalidConfig(format!("clip limit must be >= 1, got {clip_limit}")));
    }
    let xb = tile_bounds(w, cols);
    let yb = tile_bounds(h, rows);

    let mut luts = vec![[0u8; 256]; cols * rows];
    for ty in 0..rows {
        for tx in 0..cols {
            let mut hist = [0.0f64; 256];
            for y in yb[ty]..yb[ty + 1] {
                for x in xb[tx]..xb[tx + 1] {
                    hist[plane.get(x, y) as usize] += 1.0;
                }
            }
            let n = ((xb[tx + 1] - xb[tx]) * (yb[ty + 1] - yb[ty])) as f64;
            clip_histogram(&mut hist, clip_limit * n / 256.0);
            let lut = &mut luts[ty * cols + tx];
            let mut cdf = 0.0;
            for (v, &count) in hist.iter().enumerate() {
                cdf += count;
                lut[v] = (cdf * 255.0 / n).round().clamp(0.0, 255.0) as u8;
            }
        }
    }

    let xw = axis_weights(&xb);
    let yw = axis_weights(&yb);
    let mut data = Vec::with_capacity(w * h);
    for (y, &(y0, y1, ty)) in yw.iter().enumerate() {
        for (x, &(x0, x1, tx)) in xw.iter().enumerate() {
            let v = plane.get(x, y) as usize;
            let at = |row: usize, col: usize| f64::from(luts[row * cols + col][v]);
            let top = at(y0, x0) * (1.0 - tx) + at(y0, x1) * tx;
            let bottom = at(y1, x0) * (1.0 - tx) + at(y1, x1) * tx;
            let out = top * (1.0 - ty) + bottom * ty;
            data.push(out.round().clamp(0.0, 255.0) as u8);
        }
    }
    ChannelPlane::new(w, h, data)
}

/// Quantize, convert to HSV, equalize each 8-bit plane, merge.
pub fn enhance(img: &RgbImage, cfg: &PipelineConfig) -> Result<HsvImage> {
    let (quantized, _) = kmeans_quantize(img, cfg.quantize_k, cfg.seed, cfg.quantize_max_iters)?;
    let (h, s, v) = split_channels(&rgb_to_hsv(&quantized));
    let grid = (cfg.clahe_grid[0], cfg.clahe_grid[1]);
    let eq = |p: &ChannelPlane| clahe(p, cfg.clahe_clip, grid);
    let (h, (s, v)) = rayon::join(|| eq(&h), || rayon::join(|| eq(&s), || eq(&v)));
    merge_channels(&h?, &s?, &v?)
}
