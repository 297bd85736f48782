//! Synthetic dermoscopy-like fixtures with known lesion masks: a dark
//! ellipse on a skin-tone background, Gaussian sensor noise, and an optional
//! black frame around the field of view.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::raster::{hsv_pixel_to_rgb, BinaryMask, Hsv, Rgb, RgbImage};

#[derive(Debug, Clone, PartialEq)]
pub struct FixtureSpec {
    pub width: usize,
    pub height: usize,
    pub center: (f64, f64),
    /// Semi-axes in pixels before rotation.
    pub semi_axes: (f64, f64),
    /// Rotation in radians.
    pub angle: f64,
    pub lesion: Rgb,
    pub skin: Rgb,
    pub noise_sigma: f64,
    /// Thickness of the black frame, 0 for none.
    pub frame: usize,
}

impl FixtureSpec {
    pub fn inside(&self, x: usize, y: usize) -> bool {
        let (dx, dy) = (x as f64 - self.center.0, y as f64 - self.center.1);
        let (s, c) = self.angle.sin_cos();
        let u = c * dx + s * dy;
        let v = -s * dx + c * dy;
        (u / self.semi_axes.0).powi(2) + (v / self.semi_axes.1).powi(2) <= 1.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LesionFixture {
    pub spec: FixtureSpec,
    pub image: RgbImage,
    pub truth: BinaryMask,
}

pub fn render_fixture(spec: &FixtureSpec, seed: u64) -> LesionFixture {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, spec.noise_sigma.max(f64::MIN_POSITIVE)).expect("finite sigma");
    let (w, h) = (spec.width, spec.height);
    let t = spec.frame;
    let image = RgbImage::from_fn(w, h, |x, y| {
        let base = if spec.inside(x, y) { spec.lesion } else { spec.skin };
        let px = base.map(|c| (f64::from(c) + noise.sample(&mut rng)).round().clamp(0.0, 255.0) as u8);
        if x < t || y < t || x + t >= w || y + t >= h {
            [0, 0, 0]
        } else {
            px
        }
    })
    .expect("positive dimensions");
    let truth = BinaryMask::from_fn(w, h, |x, y| spec.inside(x, y)).expect("positive dimensions");
    LesionFixture {
        spec: spec.clone(),
        image,
        truth,
    }
}

/// Hue (degrees), saturation and value ranges for a tone.
pub type ToneRange = ([f64; 2], [f64; 2], [f64; 2]);

/// Brown, melanin-like lesions.
pub const LESION_TONES: ToneRange = ([10.0, 35.0], [0.55, 0.75], [0.32, 0.47]);
/// Reddish lesions whose hue sits near 0 degrees.
pub const REDDISH_TONES: ToneRange = ([-6.0, 6.0], [0.50, 0.70], [0.32, 0.47]);
pub const SKIN_TONES: ToneRange = ([15.0, 30.0], [0.20, 0.35], [0.80, 0.92]);

fn tone(rng: &mut ChaCha8Rng, (h, s, v): ToneRange) -> Rgb {
    let hue = rng.random_range(h[0]..h[1]).rem_euclid(360.0);
    hsv_pixel_to_rgb(Hsv::new(hue, rng.random_range(s[0]..s[1]), rng.random_range(v[0]..v[1])))
}

/// `count` varied fixtures at `size x size`: brown lesions on light skin
/// with varying size, eccentricity, rotation and tone. Every other fixture
/// carries a black frame of 4 to 20 pixels, thinner if the lesion would
/// otherwise touch it.
pub fn fixture_set(count: usize, size: usize, seed: u64) -> Vec<LesionFixture> {
    fixture_set_with(count, size, seed, LESION_TONES)
}

/// As [`fixture_set`] with lesion tones drawn from `lesion`.
pub fn fixture_set_with(count: usize, size: usize, seed: u64, lesion: ToneRange) -> Vec<LesionFixture> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = size as f64;
    (0..count)
        .map(|i| {
            let major = rng.random_range(0.16..0.34) * s;
            let minor = major * rng.random_range(0.5..1.0);
            let jitter = 0.06 * s;
            // keep the frame clear of the lesion on small images
            let clearance = (s / 2.0 - jitter - major - 2.0).max(0.0) as usize;
            let frame = if i % 2 == 1 { rng.random_range(4..=20).min(clearance) } else { 0 };
            let spec = FixtureSpec {
                width: size,
                height: size,
                center: (
                    s / 2.0 + rng.random_range(-jitter..jitter),
                    s / 2.0 + rng.random_range(-jitter..jitter),
                ),
                semi_axes: (major, minor),
                angle: rng.random_range(0.0..std::f64::consts::PI),
                lesion: tone(&mut rng, lesion),
                skin: tone(&mut rng, SKIN_TONES),
                noise_sigma: 10.0,
                frame,
            };
            render_fixture(&spec, rng.random())
        })
        .collect()
}
