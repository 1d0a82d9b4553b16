//! End-to-end saliency: coarse map, Bayesian posterior, geodesic refinement.

use log::debug;
use serde::{Deserialize, Serialize};

use crate::bayes;
use crate::error::{Error, Result, Stage};
use crate::imagecore::{srgb_to_lab, RgbImage, SaliencyMap, MIN_IMAGE_SIDE};
use crate::refine::{self, SuperpixelGraph};
use crate::sbd::{self, EigenFloor, SbdConfig};

/// Smallest average superpixel area the pipeline will request, in pixels.
const MIN_SUPERPIXEL_AREA: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub patch_size: usize,
    pub scales: Vec<f64>,
    /// Border band width; defaults to `patch_size`.
    pub border_width: Option<usize>,
    pub histogram_bins: usize,
    pub superpixel_target: usize,
    pub eig_floor: EigenFloor,
    /// Also write `S^cm` and `S_p` next to the final map.
    pub emit_intermediate: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            patch_size: 7,
            scales: vec![1.0, 0.5, 0.25],
            border_width: None,
            histogram_bins: 16,
            superpixel_target: 200,
            eig_floor: EigenFloor::default(),
            emit_intermediate: false,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.patch_size < 3 || self.patch_size % 2 == 0 {
            return bad(format!("patch_size must be odd and >= 3, got {}", self.patch_size));
        }
        if self.scales.is_empty() {
            return bad("at least one scale is required".into());
        }
        if let Some(&r) = self.scales.iter().find(|&&r| !(r > 0.0 && r <= 1.0)) {
            return bad(format!("scale {r} is outside (0, 1]"));
        }
        if self.border_width == Some(0) {
            return bad("border_width must be positive".into());
        }
        if self.histogram_bins == 0 {
            return bad("histogram_bins must be positive".into());
        }
        if self.superpixel_target < 2 {
            return bad(format!(
                "superpixel_target must be >= 2, got {}",
                self.superpixel_target
            ));
        }
        if !(self.eig_floor.relative >= 0.0 && self.eig_floor.absolute > 0.0) {
            return bad("eig_floor needs relative >= 0 and absolute > 0".into());
        }
        Ok(())
    }

    pub fn sbd(&self) -> SbdConfig {
        SbdConfig {
            patch_size: self.patch_size,
            border_width: self.border_width,
            scales: self.scales.clone(),
            eig_floor: self.eig_floor,
        }
    }
}

/// Maps produced by [`run_pipeline`] plus the refinement graph.
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    /// Multi-scale coarse map `S^cm`.
    pub coarse: SaliencyMap,
    /// Posterior map `S_p`.
    pub posterior: SaliencyMap,
    /// Refined, normalized saliency map.
    pub saliency: SaliencyMap,
    pub graph: SuperpixelGraph,
    /// Refined per-superpixel values before painting and normalization.
    pub refined: Vec<f64>,
}

pub fn run_pipeline(img: &RgbImage, cfg: &PipelineConfig) -> Result<PipelineOutput> {
    let (w, h) = (img.width(), img.height());
    cfg.validate().map_err(|e| e.in_stage(Stage::ImageCore))?;
    if w < MIN_IMAGE_SIDE || h < MIN_IMAGE_SIDE || cfg.patch_size > w.min(h) {
        let err = if cfg.patch_size > w.min(h) {
            Error::InvalidPatchSize {
                size: cfg.patch_size,
                width: w,
                height: h,
            }
        } else {
            Error::ImageTooSmall {
                width: w,
                height: h,
                min: MIN_IMAGE_SIDE,
            }
        };
        return Err(err.in_stage(Stage::ImageCore));
    }

    let coarse = sbd::coarse_saliency_multiscale(img, &cfg.sbd()).map_err(|e| e.in_stage(Stage::Sbd))?;

    let lab = srgb_to_lab(img);
    let lab = [&lab[0], &lab[1], &lab[2]];
    let posterior = bayes::enhance(&coarse, lab, cfg.histogram_bins).map_err(|e| e.in_stage(Stage::Bayes))?;

    let target = cfg.superpixel_target.min(w * h / MIN_SUPERPIXEL_AREA).max(2);
    if target != cfg.superpixel_target {
        debug!("superpixel target lowered to {target} for a {w}x{h} image");
    }
    let refine_stage = || -> Result<_> {
        let sp = refine::slic(lab, target, refine::DEFAULT_COMPACTNESS, refine::DEFAULT_ITERATIONS)?;
        let graph = SuperpixelGraph::build(sp, lab, &posterior)?;
        let gd = refine::geodesic_distances(&graph);
        let refined = refine::refine_superpixels(graph.mean_posterior(), &gd);
        let saliency = refine::refine_map(&graph, &gd)?;
        Ok((graph, refined, saliency))
    };
    let (graph, refined, saliency) = refine_stage().map_err(|e| e.in_stage(Stage::Refine))?;

    Ok(PipelineOutput {
        coarse,
        posterior,
        saliency,
        graph,
        refined,
    })
}
