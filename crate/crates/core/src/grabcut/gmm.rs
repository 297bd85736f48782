//! Gaussian mixture color models with hard-assignment fitting.

use std::f64::consts::PI;

use crate::cluster::{color_histogram, kmeans, rgb_point, Point};
use crate::error::{Error, Result};
use crate::harness::config::DataTerm;
use crate::raster::Rgb;

/// Added to every covariance diagonal, 8-bit color scale.
pub const COVARIANCE_FLOOR: f64 = 1.0;

const KMEANS_INIT_ITERS: usize = 10;
const KMEANS_INIT_TOLERANCE: f64 = 1e-3;

pub type Mat3 = [[f64; 3]; 3];

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianComponent {
    pub weight: f64,
    pub mean: Point,
    pub covariance: Mat3,
    pub inverse: Mat3,
    pub log_det: f64,
    /// `ln w - 3/2 ln 2pi - 1/2 ln |Sigma|`
    log_coef: f64,
}

fn det3(m: &Mat3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn inverse3(m: &Mat3, det: f64) -> Mat3 {
    let inv_det = 1.0 / det;
    [
        [
            (m[1][1] * m[2][2] - m[1][2] * m[2][1]) * inv_det,
            (m[0][2] * m[2][1] - m[0][1] * m[2][2]) * inv_det,
            (m[0][1] * m[1][2] - m[0][2] * m[1][1]) * inv_det,
        ],
        [
            (m[1][2] * m[2][0] - m[1][0] * m[2][2]) * inv_det,
            (m[0][0] * m[2][2] - m[0][2] * m[2][0]) * inv_det,
            (m[0][2] * m[1][0] - m[0][0] * m[1][2]) * inv_det,
        ],
        [
            (m[1][0] * m[2][1] - m[1][1] * m[2][0]) * inv_det,
            (m[0][1] * m[2][0] - m[0][0] * m[2][1]) * inv_det,
            (m[0][0] * m[1][1] - m[0][1] * m[1][0]) * inv_det,
        ],
    ]
}

impl GaussianComponent {
    pub fn new(weight: f64, mean: Point, covariance: Mat3) -> Self {
        let det = det3(&covariance);
        let inverse = inverse3(&covariance, det);
        let log_det = det.ln();
        Self {
            weight,
            mean,
            covariance,
            inverse,
            log_det,
            log_coef: weight.ln() - 1.5 * (2.0 * PI).ln() - 0.5 * log_det,
        }
    }

    fn mahalanobis_sq(&self, z: &Point) -> f64 {
        let d = [z[0] - self.mean[0], z[1] - self.mean[1], z[2] - self.mean[2]];
        let m = &self.inverse;
        let mut acc = 0.0;
        for i in 0..3 {
            acc += d[i] * (m[i][0] * d[0] + m[i][1] * d[1] + m[i][2] * d[2]);
        }
        acc
    }

    /// `ln(w N(z; mu, Sigma))`
    pub fn weighted_log_density(&self, z: &Point) -> f64 {
        self.log_coef - 0.5 * self.mahalanobis_sq(z)
    }
}

/// Running weight, sum and outer-product sums for one component.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    mass: f64,
    sum: [f64; 3],
    outer: Mat3,
}

impl Moments {
    fn add(&mut self, p: &Point, w: f64) {
        self.mass += w;
        for i in 0..3 {
            self.sum[i] += w * p[i];
            for j in 0..3 {
                self.outer[i][j] += w * p[i] * p[j];
            }
        }
    }

    fn finish(&self, total: f64) -> GaussianComponent {
        let mean = self.sum.map(|s| s / self.mass);
        let mut cov = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                cov[i][j] = self.outer[i][j] / self.mass - mean[i] * mean[j];
            }
        }
        // symmetrize and clear negative rounding on the diagonal
        for i in 0..3 {
            cov[i][i] = cov[i][i].max(0.0) + COVARIANCE_FLOOR;
            for j in 0..i {
                let avg = 0.5 * (cov[i][j] + cov[j][i]);
                cov[i][j] = avg;
                cov[j][i] = avg;
            }
        }
        GaussianComponent::new(self.mass / total, mean, cov)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GmmModel {
    components: Vec<GaussianComponent>,
}

impl GmmModel {
    pub fn from_components(components: Vec<GaussianComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::EmptyPixelSet);
        }
        Ok(Self { components })
    }

    /// Builds a model from points with weights and a component label per
    /// point. Labels that received no mass are dropped.
    pub fn from_assignment(points: &[Point], weights: &[f64], assignment: &[usize], groups: usize) -> Result<Self> {
        let mut moments = vec![Moments::default(); groups];
        for ((p, &w), &a) in points.iter().zip(weights).zip(assignment) {
            moments[a].add(p, w);
        }
        let total: f64 = moments.iter().map(|m| m.mass).sum();
        if total <= 0.0 {
            return Err(Error::EmptyPixelSet);
        }
        let components = moments
            .iter()
            .filter(|m| m.mass > 0.0)
            .map(|m| m.finish(total))
            .collect();
        Self::from_components(components)
    }

    pub fn components(&self) -> &[GaussianComponent] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// `-ln sum_k w_k N(z; mu_k, Sigma_k)`. May be negative.
    pub fn neg_log_likelihood(&self, z: &Point) -> f64 {
        let logs: Vec<f64> = self.components.iter().map(|c| c.weighted_log_density(z)).collect();
        let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = logs.iter().map(|l| (l - max).exp()).sum();
        -(max + sum.ln())
    }

    /// Index of the component with the largest weighted likelihood (lowest
    /// index on ties) and that log likelihood.
    pub fn best_component(&self, z: &Point) -> (usize, f64) {
        let mut best = (0, f64::NEG_INFINITY);
        for (i, c) in self.components.iter().enumerate() {
            let l = c.weighted_log_density(z);
            if l > best.1 {
                best = (i, l);
            }
        }
        best
    }

    pub fn data_term(&self, z: &Point, kind: DataTerm) -> f64 {
        match kind {
            DataTerm::FullMixture => self.neg_log_likelihood(z),
            DataTerm::AssignedComponent => -self.best_component(z).1,
        }
    }

    pub fn weight_sum(&self) -> f64 {
        self.components.iter().map(|c| c.weight).sum()
    }
}

/// Clusters the pixels with k-means into `min(k, distinct colors)` groups and
/// takes each group's weight, mean and floored covariance.
pub fn fit_gmm(pixels: &[Rgb], k: usize, seed: u64) -> Result<GmmModel> {
    if pixels.is_empty() {
        return Err(Error::EmptyPixelSet);
    }
    let hist = color_histogram(pixels.iter().copied());
    let points: Vec<Point> = hist.iter().map(|(c, _)| rgb_point(*c)).collect();
    let weights: Vec<f64> = hist.iter().map(|(_, n)| *n as f64).collect();
    fit_weighted(&points, &weights, k, seed)
}

pub(crate) fn fit_weighted(points: &[Point], weights: &[f64], k: usize, seed: u64) -> Result<GmmModel> {
    if points.is_empty() || k == 0 {
        return Err(Error::EmptyPixelSet);
    }
    let km = kmeans(points, weights, k, seed, KMEANS_INIT_ITERS, KMEANS_INIT_TOLERANCE);
    GmmModel::from_assignment(points, weights, &km.assignment, km.centroids.len())
}
