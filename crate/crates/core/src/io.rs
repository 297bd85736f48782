//! PNG/JPEG decode and encode for images and masks.

use std::path::Path;

use image::{GrayImage, ImageBuffer, Luma, Rgb as ImgRgb};

use crate::error::Result;
use crate::raster::{BinaryMask, RgbImage};

/// Ground-truth masks are stored as 0/255; anything at or above this is lesion.
pub const MASK_THRESHOLD: u8 = 128;

/// Decodes any supported image as 8-bit RGB. Alpha is dropped.
pub fn load_rgb(path: impl AsRef<Path>) -> Result<RgbImage> {
    let decoded = image::open(path.as_ref())?.into_rgb8();
    let (w, h) = decoded.dimensions();
    let data = decoded.pixels().map(|p| p.0).collect();
    RgbImage::new(w as usize, h as usize, data)
}

pub fn save_rgb(img: &RgbImage, path: impl AsRef<Path>) -> Result<()> {
    let flat: Vec<u8> = img.pixels().iter().flatten().copied().collect();
    let buf: ImageBuffer<ImgRgb<u8>, _> =
        ImageBuffer::from_raw(img.width() as u32, img.height() as u32, flat)
            .expect("buffer length matches dimensions");
    buf.save(path.as_ref())?;
    Ok(())
}

/// Loads a mask, converting to grayscale and binarizing at [`MASK_THRESHOLD`].
pub fn load_mask(path: impl AsRef<Path>) -> Result<BinaryMask> {
    let gray = image::open(path.as_ref())?.into_luma8();
    let (w, h) = gray.dimensions();
    let data = gray.pixels().map(|p| p.0[0] >= MASK_THRESHOLD).collect();
    BinaryMask::new(w as usize, h as usize, data)
}

/// Writes a single-channel 8-bit PNG, 0 = background, 255 = lesion.
pub fn save_mask(mask: &BinaryMask, path: impl AsRef<Path>) -> Result<()> {
    let flat: Vec<u8> = mask.pixels().iter().map(|&b| if b { 255 } else { 0 }).collect();
    let buf: GrayImage = ImageBuffer::<Luma<u8>, _>::from_raw(mask.width() as u32, mask.height() as u32, flat)
        .expect("buffer length matches dimensions");
    buf.save(path.as_ref())?;
    Ok(())
}
