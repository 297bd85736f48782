//! Dark outer border removal: detect the boundary-connected dark region and
//! fill it from its neighbours by onion-peel inpainting.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::raster::{BinaryMask, Rgb, RgbImage};

pub const DEFAULT_DARK_THRESHOLD: u8 = 30;

fn is_dark(px: Rgb, threshold: u8) -> bool {
    px.iter().copied().max().unwrap_or(0) < threshold
}

/// Marks pixels with `max(R,G,B) < dark_threshold` that are 4-connected,
/// through dark pixels, to the image boundary.
pub fn detect_dark_border(img: &RgbImage, dark_threshold: u8) -> BinaryMask {
    let (w, h) = img.dims();
    let mut mask = vec![false; w * h];
    let mut queue = VecDeque::new();

    let seed = |x: usize, y: usize, mask: &mut Vec<bool>, queue: &mut VecDeque<(usize, usize)>| {
        let i = y * w + x;
        if !mask[i] && is_dark(img.get(x, y), dark_threshold) {
            mask[i] = true;
            queue.push_back((x, y));
        }
    };
    for x in 0..w {
        seed(x, 0, &mut mask, &mut queue);
        seed(x, h - 1, &mut mask, &mut queue);
    }
    for y in 0..h {
        seed(0, y, &mut mask, &mut queue);
        seed(w - 1, y, &mut mask, &mut queue);
    }

    while let Some((x, y)) = queue.pop_front() {
        let neighbours = [
            (x.wrapping_sub(1), y),
            (x + 1, y),
            (x, y.wrapping_sub(1)),
            (x, y + 1),
        ];
        for (nx, ny) in neighbours {
            if nx < w && ny < h {
                seed(nx, ny, &mut mask, &mut queue);
            }
        }
    }
    BinaryMask::new(w, h, mask).expect("mask sized from image")
}

/// Onion-peel fill. Each layer takes the masked pixels that touch (8-neighbourhood)
/// at least one known pixel and sets them to the rounded mean of their known
/// neighbours. A layer reads only values settled by earlier layers, so the
/// result does not depend on scan order. Unmasked pixels are never changed.
pub fn inpaint(img: &RgbImage, mask: &BinaryMask) -> Result<RgbImage> {
    img.check_dims(mask.dims())?;
    let (w, h) = img.dims();
    let mut known: Vec<bool> = mask.pixels().iter().map(|&m| !m).collect();
    if !known.contains(&true) {
        return Err(Error::FullyMaskedImage);
    }
    let mut out = img.clone();
    let mut pending: Vec<usize> = (0..w * h).filter(|&i| !known[i]).collect();
    let mut layer: Vec<(usize, Rgb)> = Vec::new();

    while !pending.is_empty() {
        layer.clear();
        pending.retain(|&i| {
            let (x, y) = (i % w, i / w);
            let mut sum = [0u32; 3];
            let mut n = 0u32;
            for ny in y.saturating_sub(1)..=(y + 1).min(h - 1) {
                for nx in x.saturating_sub(1)..=(x + 1).min(w - 1) {
                    let j = ny * w + nx;
                    if j != i && known[j] {
                        let px = out.pixels()[j];
                        for c in 0..3 {
                            sum[c] += u32::from(px[c]);
                        }
                        n += 1;
                    }
                }
            }
            if n == 0 {
                return true;
            }
            layer.push((i, sum.map(|s| ((s + n / 2) / n) as u8)));
            false
        });
        // the grid is connected and at least one pixel is known, so every layer is non-empty
        debug_assert!(!layer.is_empty());
        let pixels = out.pixels_mut();
        for &(i, px) in &layer {
            pixels[i] = px;
            known[i] = true;
        }
    }
    Ok(out)
}

pub fn remove_border(img: &RgbImage, dark_threshold: u8) -> Result<RgbImage> {
    let mask = detect_dark_border(img, dark_threshold);
    if mask.is_all_zero() {
        return Ok(img.clone());
    }
    inpaint(img, &mask)
}
