//! Weighted k-means with k-means++ seeding over 3-vectors.
//!
//! Both color quantization and mixture fitting cluster 8-bit colors, so the
//! input is usually a color histogram: distinct colors with pixel counts as
//! weights. That is equivalent to clustering every pixel, and much cheaper.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::raster::Rgb;

pub type Point = [f64; 3];

#[inline]
pub fn sq_dist(a: &Point, b: &Point) -> f64 {
    let d0 = a[0] - b[0];
    let d1 = a[1] - b[1];
    let d2 = a[2] - b[2];
    d0 * d0 + d1 * d1 + d2 * d2
}

/// Distinct colors in ascending packed order with their pixel counts.
pub fn color_histogram(pixels: impl IntoIterator<Item = Rgb>) -> Vec<(Rgb, u64)> {
    let mut packed: Vec<u32> = pixels
        .into_iter()
        .map(|[r, g, b]| (u32::from(r) << 16) | (u32::from(g) << 8) | u32::from(b))
        .collect();
    packed.sort_unstable();
    let mut out: Vec<(Rgb, u64)> = Vec::new();
    for c in packed {
        let rgb = [(c >> 16) as u8, (c >> 8) as u8, c as u8];
        match out.last_mut() {
            Some((last, n)) if *last == rgb => *n += 1,
            _ => out.push((rgb, 1)),
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct KMeans {
    pub centroids: Vec<Point>,
    /// Cluster index per input point.
    pub assignment: Vec<usize>,
    /// Total weighted squared distance after every assignment step.
    pub cost_history: Vec<f64>,
    pub iterations: usize,
}

impl KMeans {
    /// Weighted population per cluster.
    pub fn cluster_weights(&self, weights: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.centroids.len()];
        for (&a, &w) in self.assignment.iter().zip(weights) {
            out[a] += w;
        }
        out
    }
}

pub fn nearest(centroids: &[Point], p: &Point) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (i, c) in centroids.iter().enumerate() {
        let d = sq_dist(c, p);
        if d < best.1 {
            best = (i, d);
        }
    }
    best
}

fn pick_weighted(rng: &mut ChaCha8Rng, weights: &[f64], total: f64) -> usize {
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        acc += w;
        last_positive = i;
        if target < acc {
            return i;
        }
    }
    last_positive
}

/// k-means++ seeding. Stops early when every point already coincides with a
/// chosen center, so fewer than `k` centers come back for inputs with fewer
/// than `k` distinct points.
pub fn seed_plus_plus(points: &[Point], weights: &[f64], k: usize, rng: &mut ChaCha8Rng) -> Vec<Point> {
    let total: f64 = weights.iter().sum();
    if points.is_empty() || k == 0 || total <= 0.0 {
        return Vec::new();
    }
    let first = pick_weighted(rng, weights, total);
    let mut centers = vec![points[first]];
    let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(p, &points[first])).collect();
    while centers.len() < k {
        let scores: Vec<f64> = d2.iter().zip(weights).map(|(d, w)| d * w).collect();
        let total: f64 = scores.iter().sum();
        if total <= 0.0 {
            break;
        }
        let next = points[pick_weighted(rng, &scores, total)];
        for (d, p) in d2.iter_mut().zip(points) {
            *d = d.min(sq_dist(p, &next));
        }
        centers.push(next);
    }
    centers
}

fn assign(points: &[Point], weights: &[f64], centroids: &[Point], assignment: &mut [usize]) -> f64 {
    let mut cost = 0.0;
    for ((p, &w), a) in points.iter().zip(weights).zip(assignment.iter_mut()) {
        let (i, d) = nearest(centroids, p);
        *a = i;
        cost += w * d;
    }
    cost
}

/// Lloyd iterations from k-means++ seeds until the largest per-coordinate
/// centroid shift drops below `tolerance` or `max_iters` updates have run.
/// Empty clusters keep their previous centroid.
pub fn kmeans(
    points: &[Point],
    weights: &[f64],
    k: usize,
    seed: u64,
    max_iters: usize,
    tolerance: f64,
) -> KMeans {
    assert_eq!(points.len(), weights.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = seed_plus_plus(points, weights, k, &mut rng);
    let mut assignment = vec![0; points.len()];
    let mut cost_history = Vec::new();
    let mut iterations = 0;
    if centroids.is_empty() {
        return KMeans {
            centroids,
            assignment,
            cost_history,
            iterations,
        };
    }

    cost_history.push(assign(points, weights, &centroids, &mut assignment));
    while iterations < max_iters {
        let mut sums = vec![[0.0; 3]; centroids.len()];
        let mut mass = vec![0.0; centroids.len()];
        for ((p, &w), &a) in points.iter().zip(weights).zip(&assignment) {
            for c in 0..3 {
                sums[a][c] += w * p[c];
            }
            mass[a] += w;
        }
        let mut shift = 0.0f64;
        for ((c, s), &m) in centroids.iter_mut().zip(&sums).zip(&mass) {
            if m > 0.0 {
                let updated = [s[0] / m, s[1] / m, s[2] / m];
                for i in 0..3 {
                    shift = shift.max((updated[i] - c[i]).abs());
                }
                *c = updated;
            }
        }
        iterations += 1;
        cost_history.push(assign(points, weights, &centroids, &mut assignment));
        if shift < tolerance {
            break;
        }
    }
    KMeans {
        centroids,
        assignment,
        cost_history,
        iterations,
    }
}

pub fn rgb_point(px: Rgb) -> Point {
    px.map(f64::from)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_counts_and_orders() {
        let h = color_histogram([[3, 0, 0], [1, 2, 3], [3, 0, 0], [0, 0, 9]]);
        assert_eq!(h, vec![([0, 0, 9], 1), ([1, 2, 3], 1), ([3, 0, 0], 2)]);
    }

    #[test]
    fn seeding_stops_at_distinct_count() {
        let pts = vec![[0.0; 3], [0.0; 3], [5.0, 5.0, 5.0]];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = seed_plus_plus(&pts, &[1.0, 1.0, 1.0], 8, &mut rng);
        assert_eq!(c.len(), 2);
    }

    #[test]
    fn cost_never_increases() {
        let pts: Vec<Point> = (0..200)
            .map(|i| {
                let t = i as f64;
                [(t * 37.0) % 255.0, (t * 91.0) % 255.0, (t * 13.0) % 255.0]
            })
            .collect();
        let w = vec![1.0; pts.len()];
        for seed in 0..10 {
            let km = kmeans(&pts, &w, 6, seed, 50, 1e-9);
            for pair in km.cost_history.windows(2) {
                assert!(pair[1] <= pair[0] + 1e-9 * pair[0].abs());
            }
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let pts: Vec<Point> = (0..50).map(|i| [i as f64, (i * i % 17) as f64, 3.0]).collect();
        let w = vec![1.0; 50];
        let a = kmeans(&pts, &w, 4, 11, 20, 0.5);
        let b = kmeans(&pts, &w, 4, 11, 20, 0.5);
        assert_eq!(a.centroids, b.centroids);
        assert_eq!(a.assignment, b.assignment);
    }
}
