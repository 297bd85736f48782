//! Raster buffers, RGB/HSV conversion and channel split/merge.
//!
//! All buffers are row-major. RGB pixels are 8-bit triples; HSV pixels carry
//! hue in degrees `[0, 360)` and saturation/value as fractions in `[0, 1]`.
//! Achromatic pixels get hue 0.

use crate::error::{Error, Result};

pub type Rgb = [u8; 3];

fn check_len(width: usize, height: usize, len: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidRaster(format!(
            "dimensions must be positive, got {width}x{height}"
        )));
    }
    if len != width * height {
        return Err(Error::InvalidRaster(format!(
            "{width}x{height} raster needs {} pixels, got {len}",
            width * height
        )));
    }
    Ok(())
}

fn check_same_dims(expected: (usize, usize), actual: (usize, usize)) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch { expected, actual });
    }
    Ok(())
}

macro_rules! raster_common {
    ($ty:ty, $px:ty) => {
        impl $ty {
            pub fn width(&self) -> usize {
                self.width
            }

            pub fn height(&self) -> usize {
                self.height
            }

            pub fn dims(&self) -> (usize, usize) {
                (self.width, self.height)
            }

            pub fn len(&self) -> usize {
                self.data.len()
            }

            pub fn is_empty(&self) -> bool {
                self.data.is_empty()
            }

            pub fn pixels(&self) -> &[$px] {
                &self.data
            }

            #[inline]
            pub fn index(&self, x: usize, y: usize) -> usize {
                debug_assert!(x < self.width && y < self.height);
                y * self.width + x
            }

            #[inline]
            pub fn get(&self, x: usize, y: usize) -> $px {
                self.data[self.index(x, y)]
            }

            pub fn check_dims(&self, dims: (usize, usize)) -> Result<()> {
                check_same_dims(self.dims(), dims)
            }
        }
    };
}

/// 8-bit RGB image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    data: Vec<Rgb>,
}

raster_common!(RgbImage, Rgb);

impl RgbImage {
    pub fn new(width: usize, height: usize, data: Vec<Rgb>) -> Result<Self> {
        check_len(width, height, data.len())?;
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, color: Rgb) -> Result<Self> {
        Self::new(width, height, vec![color; width * height])
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> Rgb) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    pub fn set(&mut self, x: usize, y: usize, px: Rgb) {
        let i = self.index(x, y);
        self.data[i] = px;
    }

    pub fn pixels_mut(&mut self) -> &mut [Rgb] {
        &mut self.data
    }

    pub fn into_pixels(self) -> Vec<Rgb> {
        self.data
    }
}

/// HSV pixel: `h` in degrees `[0, 360)`, `s` and `v` in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Hsv {
    pub h: f64,
    pub s: f64,
    pub v: f64,
}

impl Hsv {
    pub fn new(h: f64, s: f64, v: f64) -> Self {
        Self { h, s, v }
    }

    fn is_valid(&self) -> bool {
        (0.0..360.0).contains(&self.h) && (0.0..=1.0).contains(&self.s) && (0.0..=1.0).contains(&self.v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HsvImage {
    width: usize,
    height: usize,
    data: Vec<Hsv>,
}

raster_common!(HsvImage, Hsv);

impl HsvImage {
    pub fn new(width: usize, height: usize, data: Vec<Hsv>) -> Result<Self> {
        check_len(width, height, data.len())?;
        if let Some(bad) = data.iter().find(|p| !p.is_valid()) {
            return Err(Error::InvalidRaster(format!("HSV value out of range: {bad:?}")));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }
}

/// Single 8-bit channel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelPlane {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

raster_common!(ChannelPlane, u8);

impl ChannelPlane {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        check_len(width, height, data.len())?;
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data)
    }
}

/// Binary mask, `true` = 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

raster_common!(BinaryMask, bool);

impl BinaryMask {
    pub fn new(width: usize, height: usize, data: Vec<bool>) -> Result<Self> {
        check_len(width, height, data.len())?;
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn empty(width: usize, height: usize) -> Result<Self> {
        Self::new(width, height, vec![false; width * height])
    }

    pub fn full(width: usize, height: usize) -> Result<Self> {
        Self::new(width, height, vec![true; width * height])
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        let i = self.index(x, y);
        self.data[i] = value;
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    pub fn is_all_zero(&self) -> bool {
        !self.data.contains(&true)
    }
}

pub fn rgb_pixel_to_hsv(px: Rgb) -> Hsv {
    let [r, g, b] = px.map(f64::from);
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = max - min;
    let v = max / 255.0;
    if delta == 0.0 {
        return Hsv::new(0.0, 0.0, v);
    }
    let s = delta / max;
    let mut h = if max == r {
        60.0 * ((g - b) / delta)
    } else if max == g {
        60.0 * ((b - r) / delta + 2.0)
    } else {
        60.0 * ((r - g) / delta + 4.0)
    };
    if h < 0.0 {
        h += 360.0;
    }
    if h >= 360.0 {
        h -= 360.0;
    }
    Hsv::new(h, s, v)
}

pub fn hsv_pixel_to_rgb(px: Hsv) -> Rgb {
    let c = px.v * px.s;
    let sector = px.h / 60.0;
    let x = c * (1.0 - (sector % 2.0 - 1.0).abs());
    let (r, g, b) = match sector as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = px.v - c;
    [r, g, b].map(|ch| ((ch + m) * 255.0).round().clamp(0.0, 255.0) as u8)
}

pub fn rgb_to_hsv(img: &RgbImage) -> HsvImage {
    HsvImage {
        width: img.width,
        height: img.height,
        data: img.data.iter().copied().map(rgb_pixel_to_hsv).collect(),
    }
}

pub fn hsv_to_rgb(img: &HsvImage) -> RgbImage {
    RgbImage {
        width: img.width,
        height: img.height,
        data: img.data.iter().copied().map(hsv_pixel_to_rgb).collect(),
    }
}

fn to_byte(x: f64) -> u8 {
    x.round().clamp(0.0, 255.0) as u8
}

/// Splits into 8-bit H, S, V planes (hue rescaled by 255/360).
pub fn split_channels(img: &HsvImage) -> (ChannelPlane, ChannelPlane, ChannelPlane) {
    let plane = |f: &dyn Fn(&Hsv) -> u8| ChannelPlane {
        width: img.width,
        height: img.height,
        data: img.data.iter().map(f).collect(),
    };
    (
        plane(&|p| to_byte(p.h * 255.0 / 360.0)),
        plane(&|p| to_byte(p.s * 255.0)),
        plane(&|p| to_byte(p.v * 255.0)),
    )
}

/// Inverse of [`split_channels`]. Hue plane value 255 maps to the largest
/// hue below 360 so that `split(merge(planes)) == planes` holds exactly.
pub fn merge_channels(h: &ChannelPlane, s: &ChannelPlane, v: &ChannelPlane) -> Result<HsvImage> {
    h.check_dims(s.dims())?;
    h.check_dims(v.dims())?;
    const MAX_HUE: f64 = 360.0f64.next_down();
    let data = h
        .data
        .iter()
        .zip(&s.data)
        .zip(&v.data)
        .map(|((&hp, &sp), &vp)| {
            Hsv::new(
                (f64::from(hp) * 360.0 / 255.0).min(MAX_HUE),
                f64::from(sp) / 255.0,
                f64::from(vp) / 255.0,
            )
        })
        .collect();
    Ok(HsvImage {
        width: h.width,
        height: h.height,
        data,
    })
}

/// Stacks three planes into an RGB image, plane order preserved.
pub fn stack_planes(a: &ChannelPlane, b: &ChannelPlane, c: &ChannelPlane) -> Result<RgbImage> {
    a.check_dims(b.dims())?;
    a.check_dims(c.dims())?;
    let data = a
        .data
        .iter()
        .zip(&b.data)
        .zip(&c.data)
        .map(|((&x, &y), &z)| [x, y, z])
        .collect();
    Ok(RgbImage {
        width: a.width,
        height: a.height,
        data,
    })
}

/// The 8-bit H/S/V planes read back as R/G/B. This is the rendering in which
/// lesions show up green after enhancement.
pub fn render_planes(img: &HsvImage) -> RgbImage {
    let (h, s, v) = split_channels(img);
    stack_planes(&h, &s, &v).expect("planes from one image share dimensions")
}
