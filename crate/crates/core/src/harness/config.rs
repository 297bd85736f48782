use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which rendering the GrabCut color models are fitted on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ModelSpace {
    /// The enhanced H/S/V planes read as three 8-bit channels.
    #[default]
    Enhanced,
    /// The border-removed RGB image.
    Raw,
}

/// How a color model scores a pixel in the data term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DataTerm {
    /// `-log sum_k w_k N(z; mu_k, Sigma_k)`.
    #[default]
    FullMixture,
    /// `min_k -log (w_k N(z; mu_k, Sigma_k))`, the best single component.
    AssignedComponent,
}

/// Every tunable of the pipeline. Deserializes from JSON with these exact
/// field names; missing fields take their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub dark_threshold: u8,
    pub quantize_k: usize,
    pub quantize_max_iters: usize,
    pub clahe_clip: f64,
    /// Tile grid as `[cols, rows]`.
    pub clahe_grid: [usize; 2],
    pub g_min: u8,
    pub tau_low: f64,
    pub tau_high: f64,
    /// Fraction of the image height left outside the fallback rectangle.
    pub rect_margin_h: f64,
    /// Fraction of the image width left outside the fallback rectangle.
    pub rect_margin_w: f64,
    pub gmm_k: usize,
    pub gamma: f64,
    pub grabcut_iterations: usize,
    pub seed: u64,
    pub model_space: ModelSpace,
    pub data_term: DataTerm,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            dark_threshold: 30,
            quantize_k: 8,
            quantize_max_iters: 20,
            clahe_clip: 2.0,
            clahe_grid: [8, 8],
            g_min: 100,
            tau_low: 0.02,
            tau_high: 0.90,
            rect_margin_h: 0.03,
            rect_margin_w: 0.10,
            gmm_k: 5,
            gamma: 50.0,
            grabcut_iterations: 5,
            seed: 0,
            model_space: ModelSpace::Enhanced,
            data_term: DataTerm::FullMixture,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(1..=256).contains(&self.quantize_k) {
            return bad(format!("quantize_k must be in 1..=256, got {}", self.quantize_k));
        }
        for (name, v) in [
            ("quantize_max_iters", self.quantize_max_iters),
            ("clahe_grid[0]", self.clahe_grid[0]),
            ("clahe_grid[1]", self.clahe_grid[1]),
            ("gmm_k", self.gmm_k),
            ("grabcut_iterations", self.grabcut_iterations),
        ] {
            if v == 0 {
                return bad(format!("{name} must be at least 1"));
            }
        }
        if self.clahe_clip.is_nan() || self.clahe_clip < 1.0 {
            return bad(format!("clahe_clip must be >= 1.0, got {}", self.clahe_clip));
        }
        for (name, v) in [("rect_margin_h", self.rect_margin_h), ("rect_margin_w", self.rect_margin_w)] {
            if !(v > 0.0 && v < 1.0) {
                return bad(format!("{name} must lie in (0, 1), got {v}"));
            }
        }
        if !(0.0..=1.0).contains(&self.tau_low) || !(0.0..=1.0).contains(&self.tau_high) {
            return bad("tau_low and tau_high must lie in [0, 1]".into());
        }
        if self.tau_low >= self.tau_high {
            return bad(format!(
                "tau_low ({}) must be below tau_high ({})",
                self.tau_low, self.tau_high
            ));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return bad(format!("gamma must be positive, got {}", self.gamma));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let ctx = || format!("config {}", path.as_ref().display());
        let text = std::fs::read_to_string(path.as_ref()).map_err(|e| Error::from(e).context(ctx()))?;
        Self::from_json(&text).map_err(|e| e.context(ctx()))
    }
}
