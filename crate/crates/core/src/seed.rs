//! GrabCut initialization: green-dominance seed mask, a confidence test on its
//! area, and the centered fallback rectangle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::config::PipelineConfig;
use crate::raster::{render_planes, BinaryMask, HsvImage};

/// Axis-aligned rectangle in pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rect {
    pub x0: usize,
    pub y0: usize,
    pub width: usize,
    pub height: usize,
}

impl Rect {
    pub fn contains(&self, x: usize, y: usize) -> bool {
        x >= self.x0 && x < self.x0 + self.width && y >= self.y0 && y < self.y0 + self.height
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrimapLabel {
    SureBackground,
    SureForeground,
    ProbableBackground,
    ProbableForeground,
}

impl TrimapLabel {
    pub fn is_foreground(self) -> bool {
        matches!(self, TrimapLabel::SureForeground | TrimapLabel::ProbableForeground)
    }

    pub fn is_sure(self) -> bool {
        matches!(self, TrimapLabel::SureForeground | TrimapLabel::SureBackground)
    }
}

/// Per-pixel seed labels. Always holds at least one foreground-side and one
/// background-side pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trimap {
    width: usize,
    height: usize,
    labels: Vec<TrimapLabel>,
}

impl Trimap {
    pub fn new(width: usize, height: usize, labels: Vec<TrimapLabel>) -> Result<Self> {
        if width == 0 || height == 0 || labels.len() != width * height {
            return Err(Error::InvalidRaster(format!(
                "{width}x{height} trimap needs {} labels, got {}",
                width * height,
                labels.len()
            )));
        }
        let fg = labels.iter().any(|l| l.is_foreground());
        let bg = labels.iter().any(|l| !l.is_foreground());
        if !fg {
            return Err(Error::InvalidSeed("no foreground-side pixels".into()));
        }
        if !bg {
            return Err(Error::InvalidSeed("no background-side pixels".into()));
        }
        Ok(Self { width, height, labels })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn labels(&self) -> &[TrimapLabel] {
        &self.labels
    }

    pub fn get(&self, x: usize, y: usize) -> TrimapLabel {
        self.labels[y * self.width + x]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InitKind {
    MaskInit,
    RectInit,
}

impl InitKind {
    pub fn as_str(self) -> &'static str {
        match self {
            InitKind::MaskInit => "MaskInit",
            InitKind::RectInit => "RectInit",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InitMode {
    Mask(BinaryMask),
    Rect(Rect),
}

impl InitMode {
    pub fn kind(&self) -> InitKind {
        match self {
            InitMode::Mask(_) => InitKind::MaskInit,
            InitMode::Rect(_) => InitKind::RectInit,
        }
    }
}

/// One pass of 3x3 majority voting. Windows are clipped at the image edge;
/// a pixel is set when more than half of its window is set.
pub fn majority_filter(mask: &BinaryMask) -> BinaryMask {
    let (w, h) = mask.dims();
    BinaryMask::from_fn(w, h, |x, y| {
        let mut ones = 0;
        let mut total = 0;
        for ny in y.saturating_sub(1)..=(y + 1).min(h - 1) {
            for nx in x.saturating_sub(1)..=(x + 1).min(w - 1) {
                total += 1;
                ones += usize::from(mask.get(nx, ny));
            }
        }
        2 * ones > total
    })
    .expect("same dimensions as input")
}

/// Reads the enhanced image's 8-bit H/S/V planes as R/G/B and keeps pixels
/// whose middle channel is at least `g_min` and strictly dominates the other two.
pub fn extract_green_mask(img: &HsvImage, cfg: &PipelineConfig) -> BinaryMask {
    let rendering = render_planes(img);
    let raw = BinaryMask::new(
        img.width(),
        img.height(),
        rendering
            .pixels()
            .iter()
            .map(|&[a, g, c]| g >= cfg.g_min && g > a && g > c)
            .collect(),
    )
    .expect("same dimensions as input");
    majority_filter(&raw)
}

/// Fraction of set pixels.
pub fn mask_confidence(mask: &BinaryMask) -> f64 {
    mask.count_ones() as f64 / mask.len() as f64
}

fn shrink(len: usize, margin: f64) -> usize {
    let kept = len as f64 - margin * len as f64;
    // absorb representation error in decimal margins such as 0.03
    ((kept + 1e-9).floor() as usize).clamp(1, len)
}

/// Centered rectangle keeping `1 - margin_w` of the width and `1 - margin_h`
/// of the height, floored.
pub fn fallback_rect_with_margins(width: usize, height: usize, margin_h: f64, margin_w: f64) -> Rect {
    let rw = shrink(width, margin_w);
    let rh = shrink(height, margin_h);
    Rect {
        x0: (width - rw) / 2,
        y0: (height - rh) / 2,
        width: rw,
        height: rh,
    }
}

/// The default fallback: 3% of the height and 10% of the width left outside.
pub fn fallback_rect(width: usize, height: usize) -> Rect {
    fallback_rect_with_margins(width, height, 0.03, 0.10)
}

/// Uses the mask when its area fraction lies in `[tau_low, tau_high]`,
/// otherwise falls back to the rectangle.
pub fn choose_init(mask: &BinaryMask, cfg: &PipelineConfig) -> InitMode {
    let conf = mask_confidence(mask);
    if (cfg.tau_low..=cfg.tau_high).contains(&conf) {
        InitMode::Mask(mask.clone())
    } else {
        InitMode::Rect(fallback_rect_with_margins(
            mask.width(),
            mask.height(),
            cfg.rect_margin_h,
            cfg.rect_margin_w,
        ))
    }
}

/// Mask/rect inside becomes probable foreground; everything else is sure background.
pub fn build_trimap(init: &InitMode, width: usize, height: usize) -> Result<Trimap> {
    let label = |fg: bool| {
        if fg {
            TrimapLabel::ProbableForeground
        } else {
            TrimapLabel::SureBackground
        }
    };
    let labels = match init {
        InitMode::Mask(mask) => {
            mask.check_dims((width, height))?;
            mask.pixels().iter().map(|&m| label(m)).collect()
        }
        InitMode::Rect(rect) => {
            if rect.x0 + rect.width > width || rect.y0 + rect.height > height {
                return Err(Error::InvalidSeed(format!(
                    "rectangle {rect:?} exceeds {width}x{height} image"
                )));
            }
            (0..height)
                .flat_map(|y| (0..width).map(move |x| label(rect.contains(x, y))))
                .collect()
        }
    };
    Trimap::new(width, height, labels)
}
