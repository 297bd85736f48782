//! GrabCut energy minimization.
//!
//! The energy of a labeling is the per-pixel data term under the model of the
//! pixel's label plus `gamma / dist * exp(-beta |z_m - z_n|^2)` for every
//! 8-connected pair with differing labels. Each iteration refits the two
//! mixtures from the current labels and relabels the probable pixels with a
//! minimum cut.

pub mod gmm;
pub mod graph;
pub mod maxflow;

pub use gmm::{fit_gmm, GaussianComponent, GmmModel, COVARIANCE_FLOOR};
pub use graph::{build_graph, compute_beta, GraphParams};
pub use maxflow::{max_flow, FlowNetwork, MaxFlow};

use crate::cluster::{rgb_point, Point};
use crate::error::{Error, Result};
use crate::harness::config::PipelineConfig;
use crate::raster::{BinaryMask, Rgb, RgbImage};
use crate::seed::{InitMode, Trimap};

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentationResult {
    /// `true` = lesion.
    pub mask: BinaryMask,
    /// Energy after each completed iteration.
    pub energy_trace: Vec<f64>,
    pub iterations_run: usize,
    /// Set by the pipeline; `None` when GrabCut was driven directly.
    pub init_mode: Option<InitMode>,
}

fn energy_from(terms: &[(f64, f64)], links: &[(u32, u32, f64)], labels: &[bool]) -> f64 {
    let data: f64 = terms
        .iter()
        .zip(labels)
        .map(|(&(f, b), &fg)| if fg { f } else { b })
        .sum();
    let smooth: f64 = links
        .iter()
        .filter(|(a, b, _)| labels[*a as usize] != labels[*b as usize])
        .map(|(_, _, c)| c)
        .sum();
    data + smooth
}

/// Total energy of a labeling (`true` = foreground) under fixed models.
pub fn compute_energy(
    img: &RgbImage,
    labels: &[bool],
    fg: &GmmModel,
    bg: &GmmModel,
    params: &GraphParams,
) -> Result<f64> {
    if labels.len() != img.len() {
        return Err(Error::InvalidRaster(format!(
            "{} labels for {} pixels",
            labels.len(),
            img.len()
        )));
    }
    let terms = graph::data_terms(img, fg, bg, params.data_term);
    let links = graph::neighbour_links(img, params);
    Ok(energy_from(&terms, &links, labels))
}

/// Most likely component of each pixel within its own class's model.
pub fn assign_components(img: &RgbImage, labels: &[bool], fg: &GmmModel, bg: &GmmModel) -> Vec<usize> {
    img.pixels()
        .iter()
        .zip(labels)
        .map(|(p, &is_fg)| {
            let model = if is_fg { fg } else { bg };
            model.best_component(&rgb_point(*p)).0
        })
        .collect()
}

/// Labels from one minimum cut with the models held fixed. Sure pixels keep
/// their trimap side.
pub fn cut_step(img: &RgbImage, trimap: &Trimap, fg: &GmmModel, bg: &GmmModel, params: &GraphParams) -> Result<Vec<bool>> {
    let net = build_graph(img, trimap, fg, bg, params)?;
    Ok(labels_from_cut(trimap, &max_flow(&net)))
}

fn labels_from_cut(trimap: &Trimap, cut: &MaxFlow) -> Vec<bool> {
    trimap
        .labels()
        .iter()
        .zip(&cut.source_side)
        .map(|(l, &s)| if l.is_sure() { l.is_foreground() } else { s })
        .collect()
}

/// Refits one class's mixture from its pixels' component assignments.
fn refit(points: &[Point], labels: &[bool], comps: &[usize], class: bool, groups: usize) -> Option<GmmModel> {
    let (pts, assignment): (Vec<Point>, Vec<usize>) = points
        .iter()
        .zip(labels)
        .zip(comps)
        .filter(|((_, &l), _)| l == class)
        .map(|((p, _), &c)| (*p, c))
        .unzip();
    let ones = vec![1.0; pts.len()];
    GmmModel::from_assignment(&pts, &ones, &assignment, groups).ok()
}

/// Iterated graph-cut segmentation.
///
/// Each iteration assigns components, refits both mixtures, builds the graph,
/// cuts it, and relabels probable pixels. A refit that would raise the energy
/// of the current labeling is discarded, so the recorded energies never
/// increase. Stops early once the labels stop changing, or if a class has
/// been emptied by the previous cut.
pub fn grabcut(img: &RgbImage, trimap: &Trimap, cfg: &PipelineConfig, seed: u64) -> Result<SegmentationResult> {
    if img.dims() != trimap.dims() {
        return Err(Error::DimensionMismatch {
            expected: img.dims(),
            actual: trimap.dims(),
        });
    }
    let (w, h) = img.dims();
    let params = GraphParams::for_image(img, cfg);
    let links = graph::neighbour_links(img, &params);
    let points: Vec<Point> = img.pixels().iter().map(|p| rgb_point(*p)).collect();
    let mut labels: Vec<bool> = trimap.labels().iter().map(|l| l.is_foreground()).collect();

    let fit_class = |class: bool, name: &'static str, seed: u64| {
        let px: Vec<Rgb> = img
            .pixels()
            .iter()
            .zip(&labels)
            .filter(|(_, &l)| l == class)
            .map(|(p, _)| *p)
            .collect();
        fit_gmm(&px, cfg.gmm_k, seed).map_err(|_| Error::DegenerateClass(name))
    };
    let mut fg = fit_class(true, "foreground", seed)?;
    let mut bg = fit_class(false, "background", seed.wrapping_add(1))?;

    let energy_of = |fg: &GmmModel, bg: &GmmModel, labels: &[bool]| {
        let terms = graph::data_terms(img, fg, bg, params.data_term);
        (energy_from(&terms, &links, labels), terms)
    };
    let (mut energy, mut terms) = energy_of(&fg, &bg, &labels);
    let mut trace = Vec::with_capacity(cfg.grabcut_iterations);

    for _ in 0..cfg.grabcut_iterations {
        let comps = assign_components(img, &labels, &fg, &bg);
        let (Some(new_fg), Some(new_bg)) = (
            refit(&points, &labels, &comps, true, fg.len()),
            refit(&points, &labels, &comps, false, bg.len()),
        ) else {
            break;
        };
        let (candidate, candidate_terms) = energy_of(&new_fg, &new_bg, &labels);
        if candidate <= energy {
            fg = new_fg;
            bg = new_bg;
            energy = candidate;
            terms = candidate_terms;
        }

        let net = graph::assemble(trimap, &terms, &links, params.gamma);
        let mut next = labels_from_cut(trimap, &max_flow(&net));
        let mut next_energy = energy_from(&terms, &links, &next);
        if next_energy > energy {
            // the cut is optimal; a higher value here is only rounding
            next = labels.clone();
            next_energy = energy;
        }
        trace.push(next_energy);
        let changed = next != labels;
        labels = next;
        energy = next_energy;
        if !changed {
            break;
        }
    }

    Ok(SegmentationResult {
        mask: BinaryMask::new(w, h, labels)?,
        iterations_run: trace.len(),
        energy_trace: trace,
        init_mode: None,
    })
}
