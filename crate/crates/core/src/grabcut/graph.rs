//! Pixel graph construction: contrast-sensitive neighbour links and terminal
//! links from the two color models.

use std::f64::consts::SQRT_2;

use super::gmm::GmmModel;
use super::maxflow::FlowNetwork;
use crate::cluster::{rgb_point, sq_dist};
use crate::error::{Error, Result};
use crate::harness::config::{DataTerm, PipelineConfig};
use crate::raster::RgbImage;
use crate::seed::{Trimap, TrimapLabel};

/// Smoothness parameters. `beta` is image-dependent, see [`compute_beta`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphParams {
    pub gamma: f64,
    pub beta: f64,
    pub data_term: DataTerm,
}

impl GraphParams {
    pub fn for_image(img: &RgbImage, cfg: &PipelineConfig) -> Self {
        Self {
            gamma: cfg.gamma,
            beta: compute_beta(img),
            data_term: cfg.data_term,
        }
    }
}

/// Forward half of the 8-neighbourhood: every unordered neighbour pair is
/// visited once as (p, p + offset).
const FORWARD: [(isize, usize, f64); 4] = [(1, 0, 1.0), (-1, 1, SQRT_2), (0, 1, 1.0), (1, 1, SQRT_2)];

fn for_each_pair(img: &RgbImage, mut f: impl FnMut(usize, usize, f64)) {
    let (w, h) = img.dims();
    for y in 0..h {
        for x in 0..w {
            for &(dx, dy, dist) in &FORWARD {
                let nx = x as isize + dx;
                let ny = y + dy;
                if nx >= 0 && (nx as usize) < w && ny < h {
                    f(y * w + x, ny * w + nx as usize, dist);
                }
            }
        }
    }
}

/// `1 / (2 * mean squared color difference)` over all 8-connected pairs,
/// or 0 when the image is constant.
pub fn compute_beta(img: &RgbImage) -> f64 {
    let px = img.pixels();
    let mut total = 0.0;
    let mut pairs = 0usize;
    for_each_pair(img, |a, b, _| {
        total += sq_dist(&rgb_point(px[a]), &rgb_point(px[b]));
        pairs += 1;
    });
    if pairs == 0 || total == 0.0 {
        return 0.0;
    }
    1.0 / (2.0 * total / pairs as f64)
}

/// Neighbour links `gamma / dist * exp(-beta |z_m - z_n|^2)`.
pub fn neighbour_links(img: &RgbImage, params: &GraphParams) -> Vec<(u32, u32, f64)> {
    let px = img.pixels();
    let mut out = Vec::with_capacity(img.len() * 4);
    for_each_pair(img, |a, b, dist| {
        let d2 = sq_dist(&rgb_point(px[a]), &rgb_point(px[b]));
        out.push((a as u32, b as u32, params.gamma / dist * (-params.beta * d2).exp()));
    });
    out
}

/// Data terms for every pixel under both models, `(foreground, background)`.
pub fn data_terms(img: &RgbImage, fg: &GmmModel, bg: &GmmModel, kind: DataTerm) -> Vec<(f64, f64)> {
    // enhanced and quantized images have few distinct colors; score each once
    let table = crate::cluster::color_histogram(img.pixels().iter().copied());
    let scores: Vec<(f64, f64)> = table
        .iter()
        .map(|(c, _)| {
            let z = rgb_point(*c);
            (fg.data_term(&z, kind), bg.data_term(&z, kind))
        })
        .collect();
    img.pixels()
        .iter()
        .map(|p| {
            let i = table.binary_search_by_key(&pack(*p), |(c, _)| pack(*c)).expect("color in table");
            scores[i]
        })
        .collect()
}

fn pack([r, g, b]: [u8; 3]) -> u32 {
    (u32::from(r) << 16) | (u32::from(g) << 8) | u32::from(b)
}

pub(crate) fn assemble(
    trimap: &Trimap,
    terms: &[(f64, f64)],
    links: &[(u32, u32, f64)],
    gamma: f64,
) -> FlowNetwork {
    let n = terms.len();
    let mut net = FlowNetwork::with_edge_capacity(n, links.len());
    // Per-pixel shift by min(fg, bg): same minimizer, capacities stay >= 0.
    let shifted: Vec<(f64, f64)> = terms
        .iter()
        .map(|&(f, b)| {
            let m = f.min(b);
            (b - m, f - m)
        })
        .collect();
    let max_term = trimap
        .labels()
        .iter()
        .zip(&shifted)
        .filter(|(l, _)| !l.is_sure())
        .map(|(_, &(s, t))| s.max(t))
        .fold(0.0, f64::max);
    let large = 9.0 * gamma + max_term;
    for (i, (&label, &(source, sink))) in trimap.labels().iter().zip(&shifted).enumerate() {
        match label {
            TrimapLabel::SureBackground => net.set_terminals(i, 0.0, large),
            TrimapLabel::SureForeground => net.set_terminals(i, large, 0.0),
            _ => net.set_terminals(i, source, sink),
        }
    }
    for &(a, b, c) in links {
        net.add_edge(a as usize, b as usize, c);
    }
    net
}

/// Probable pixels link to the source with their background cost and to the
/// sink with their foreground cost, both shifted by the smaller of the two.
/// Sure pixels get a link to their own terminal that no cut can afford.
pub fn build_graph(
    img: &RgbImage,
    trimap: &Trimap,
    fg: &GmmModel,
    bg: &GmmModel,
    params: &GraphParams,
) -> Result<FlowNetwork> {
    if img.dims() != trimap.dims() {
        return Err(Error::DimensionMismatch {
            expected: img.dims(),
            actual: trimap.dims(),
        });
    }
    let terms = data_terms(img, fg, bg, params.data_term);
    let links = neighbour_links(img, params);
    Ok(assemble(trimap, &terms, &links, params.gamma))
}
