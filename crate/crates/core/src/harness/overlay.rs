//! Visual check of a segmentation: the mask outline drawn over the image.

use crate::error::Result;
use crate::raster::{BinaryMask, Rgb, RgbImage};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlayStyle {
    pub outline: Rgb,
    /// Blend the lesion interior toward `outline` by this fraction.
    pub tint: Option<f64>,
}

impl Default for OverlayStyle {
    fn default() -> Self {
        Self {
            outline: [255, 255, 0],
            tint: None,
        }
    }
}

/// Mask pixels with a 4-neighbour outside the mask or outside the image.
pub fn boundary(mask: &BinaryMask) -> BinaryMask {
    let (w, h) = mask.dims();
    BinaryMask::from_fn(w, h, |x, y| {
        mask.get(x, y)
            && (x == 0
                || y == 0
                || x + 1 == w
                || y + 1 == h
                || !mask.get(x - 1, y)
                || !mask.get(x + 1, y)
                || !mask.get(x, y - 1)
                || !mask.get(x, y + 1))
    })
    .expect("same dimensions as the mask")
}

pub fn render_overlay_with(img: &RgbImage, mask: &BinaryMask, style: &OverlayStyle) -> Result<RgbImage> {
    mask.check_dims(img.dims())?;
    let edge = boundary(mask);
    let mut out = img.clone();
    let (w, h) = img.dims();
    for y in 0..h {
        for x in 0..w {
            if edge.get(x, y) {
                out.set(x, y, style.outline);
            } else if let (Some(a), true) = (style.tint, mask.get(x, y)) {
                let p = img.get(x, y);
                let mixed = std::array::from_fn(|c| {
                    (f64::from(p[c]) * (1.0 - a) + f64::from(style.outline[c]) * a).round().clamp(0.0, 255.0) as u8
                });
                out.set(x, y, mixed);
            }
        }
    }
    Ok(out)
}

pub fn render_overlay(img: &RgbImage, mask: &BinaryMask) -> Result<RgbImage> {
    render_overlay_with(img, mask, &OverlayStyle::default())
}
