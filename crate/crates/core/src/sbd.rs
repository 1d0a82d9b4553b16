//! Spaces of background-based distribution.
//!
//! Border patches are split into four groups, each pairing two neighboring
//! borders (top+left, top+right, bottom+left, bottom+right). A Gaussian
//! background model is fitted per group through the eigendecomposition of the
//! patch covariance, and every patch of the image is scored by its Mahalanobis
//! distance to that model. The four distance maps are thresholded at their
//! mean, normalized, and fused with binary entropy weights; the fused map is
//! averaged over a small image pyramid to give the coarse saliency map.

use log::warn;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::imagecore::{
    build_pyramid, extract_patch_features, map_entropy, normalize_map, resize_map, to_multichannel, PatchFeatureGrid,
    RgbImage, SaliencyMap, MIN_IMAGE_SIDE,
};
use crate::linalg::SymmetricEigen;

/// Number of border groups.
pub const GROUPS: usize = 4;

/// Pixels per block when scoring the whole grid.
const BLOCK: usize = 1024;

/// Patch-index sets of the four border bands and the four neighboring-border
/// groups built from them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BorderGroups {
    pub top: Vec<usize>,
    pub bottom: Vec<usize>,
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    /// `[top ∪ left, top ∪ right, bottom ∪ left, bottom ∪ right]`, each sorted.
    pub groups: [Vec<usize>; GROUPS],
}

fn sorted_union(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = a.iter().chain(b).copied().collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Border bands of width `border` around a `width x height` patch grid.
/// Corner pixels belong to both adjacent bands.
pub fn border_groups(width: usize, height: usize, border: usize) -> Result<BorderGroups> {
    if border == 0 || 2 * border >= width.min(height) {
        return Err(Error::BorderTooWide { border, width, height });
    }
    let idx = |x: usize, y: usize| y * width + x;
    let top: Vec<usize> = (0..border).flat_map(|y| (0..width).map(move |x| idx(x, y))).collect();
    let bottom: Vec<usize> = (height - border..height)
        .flat_map(|y| (0..width).map(move |x| idx(x, y)))
        .collect();
    let left: Vec<usize> = (0..height).flat_map(|y| (0..border).map(move |x| idx(x, y))).collect();
    let right: Vec<usize> = (0..height)
        .flat_map(|y| (width - border..width).map(move |x| idx(x, y)))
        .collect();
    let groups = [
        sorted_union(&top, &left),
        sorted_union(&top, &right),
        sorted_union(&bottom, &left),
        sorted_union(&bottom, &right),
    ];
    Ok(BorderGroups {
        top,
        bottom,
        left,
        right,
        groups,
    })
}

pub fn select_border_groups(grid: &PatchFeatureGrid, border: usize) -> Result<BorderGroups> {
    border_groups(grid.width(), grid.height(), border)
}

/// Eigenvalue floor `max(relative * trace(C) / dim, absolute)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EigenFloor {
    pub relative: f64,
    pub absolute: f64,
}

impl Default for EigenFloor {
    fn default() -> Self {
        Self {
            relative: 1e-6,
            absolute: 1e-12,
        }
    }
}

impl EigenFloor {
    pub fn value(&self, trace: f64, dim: usize) -> f64 {
        (self.relative * trace / dim as f64).max(self.absolute)
    }
}

/// Gaussian model of one border group.
#[derive(Debug, Clone)]
pub struct BackgroundModel {
    mean: DVector<f64>,
    covariance: DMatrix<f64>,
    eigenvectors: DMatrix<f64>,
    eigenvalues: DVector<f64>,
    projected_mean: DVector<f64>,
    floor: f64,
    /// `Λ^{-1/2} Uᵀ`, used for bulk scoring.
    whitening: DMatrix<f64>,
}

impl BackgroundModel {
    /// Fits the model to samples stored as the columns of `samples`.
    pub fn from_columns(samples: &DMatrix<f64>, floor: EigenFloor) -> Result<Self> {
        let n = samples.ncols();
        if n < 2 {
            return Err(Error::TooFewPatches(n));
        }
        let mean = samples.column_sum() / n as f64;
        let mut centered = samples.clone();
        for mut col in centered.column_iter_mut() {
            col -= &mean;
        }
        let mut covariance = &centered * centered.transpose();
        covariance /= n as f64;
        Self::from_moments(mean, covariance, floor)
    }

    /// Builds the model from a mean and a symmetric covariance matrix.
    pub fn from_moments(mean: DVector<f64>, mut covariance: DMatrix<f64>, floor: EigenFloor) -> Result<Self> {
        let dim = mean.len();
        if covariance.shape() != (dim, dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: covariance.nrows(),
            });
        }
        // Enforce exact symmetry against rounding in the product.
        for r in 0..dim {
            for c in 0..r {
                let v = 0.5 * (covariance[(r, c)] + covariance[(c, r)]);
                covariance[(r, c)] = v;
                covariance[(c, r)] = v;
            }
        }

        let eps = floor.value(covariance.trace().max(0.0), dim);
        let eig = SymmetricEigen::new(covariance.clone());
        let eigenvalues = eig.eigenvalues.map(|l| l.max(eps));
        let eigenvectors = eig.eigenvectors;
        let projected_mean = eigenvectors.tr_mul(&mean);
        let mut whitening = eigenvectors.transpose();
        for (mut row, &l) in whitening.row_iter_mut().zip(eigenvalues.iter()) {
            row /= l.sqrt();
        }
        Ok(Self {
            mean,
            covariance,
            eigenvectors,
            eigenvalues,
            projected_mean,
            floor: eps,
            whitening,
        })
    }

    /// Fits the model to the descriptors of `indices` in `grid`.
    pub fn fit_grid(grid: &PatchFeatureGrid, indices: &[usize], floor: EigenFloor) -> Result<Self> {
        let dim = grid.dim();
        let mut samples = DMatrix::zeros(dim, indices.len());
        for (col, &i) in samples.column_iter_mut().zip(indices) {
            grid.write_feature(i, col.data.into_slice_mut());
        }
        Self::from_columns(&samples, floor)
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    /// Sample covariance (normalized by `n`) before flooring.
    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    /// `U Λ Uᵀ` with the floored eigenvalues.
    pub fn floored_covariance(&self) -> DMatrix<f64> {
        let scaled = DMatrix::from_fn(self.dim(), self.dim(), |r, c| {
            self.eigenvectors[(r, c)] * self.eigenvalues[c]
        });
        &scaled * self.eigenvectors.transpose()
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    /// Floored eigenvalues, descending.
    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn projected_mean(&self) -> &DVector<f64> {
        &self.projected_mean
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    /// Scores the columns of `features` (one descriptor per column).
    fn score_columns(&self, features: &DMatrix<f64>) -> Vec<f64> {
        let mut centered = features.clone();
        for mut col in centered.column_iter_mut() {
            col -= &self.mean;
        }
        let projected = &self.whitening * centered;
        projected.column_iter().map(|c| c.norm()).collect()
    }
}

/// Fits a background model to a set of descriptors.
pub fn fit_background_model<V: AsRef<[f64]>>(group: &[V], floor: EigenFloor) -> Result<BackgroundModel> {
    if group.len() < 2 {
        return Err(Error::TooFewPatches(group.len()));
    }
    let dim = group[0].as_ref().len();
    if let Some(bad) = group.iter().find(|v| v.as_ref().len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: bad.as_ref().len(),
        });
    }
    let samples = DMatrix::from_fn(dim, group.len(), |r, c| group[c].as_ref()[r]);
    BackgroundModel::from_columns(&samples, floor)
}

/// `‖Λ^{-1/2} (Uᵀ f - p)‖₂`.
pub fn mahalanobis_distance(model: &BackgroundModel, f: &[f64]) -> Result<f64> {
    if f.len() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            actual: f.len(),
        });
    }
    let t = model.eigenvectors.tr_mul(&DVector::from_column_slice(f));
    let d2: f64 = t
        .iter()
        .zip(model.projected_mean.iter())
        .zip(model.eigenvalues.iter())
        .map(|((ti, pi), li)| (ti - pi).powi(2) / li)
        .sum();
    Ok(d2.sqrt())
}

/// Raw Mahalanobis distance of every descriptor in `grid` to each model.
pub fn distance_maps(grid: &PatchFeatureGrid, models: &[BackgroundModel]) -> Result<Vec<SaliencyMap>> {
    let dim = grid.dim();
    if let Some(m) = models.iter().find(|m| m.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: m.dim(),
        });
    }
    let n = grid.len();
    let blocks: Vec<Vec<Vec<f64>>> = (0..n.div_ceil(BLOCK))
        .into_par_iter()
        .map(|b| {
            let start = b * BLOCK;
            let end = (start + BLOCK).min(n);
            let mut features = DMatrix::zeros(dim, end - start);
            for (col, i) in features.column_iter_mut().zip(start..end) {
                grid.write_feature(i, col.data.into_slice_mut());
            }
            models.iter().map(|m| m.score_columns(&features)).collect()
        })
        .collect();

    let mut out: Vec<Vec<f64>> = vec![Vec::with_capacity(n); models.len()];
    for block in blocks {
        for (dst, src) in out.iter_mut().zip(block) {
            dst.extend(src);
        }
    }
    out.into_iter()
        .map(|v| SaliencyMap::new(grid.width(), grid.height(), v))
        .collect()
}

/// Zeros every value strictly below the map mean.
pub fn threshold_at_mean(d: &SaliencyMap) -> SaliencyMap {
    let h = d.mean();
    let mut kept = d.clone();
    for v in kept.values_mut() {
        if *v < h {
            *v = 0.0;
        }
    }
    kept
}

/// [`threshold_at_mean`] followed by normalization to `[0, 1]`.
pub fn threshold_distance_map(d: &SaliencyMap) -> Result<SaliencyMap> {
    normalize_map(&threshold_at_mean(d))
}

/// `w_q = 1` iff `entropies[q]` does not exceed their mean.
pub fn weights_from_entropies(entropies: &[f64; GROUPS]) -> [f64; GROUPS] {
    let average = entropies.iter().sum::<f64>() / GROUPS as f64;
    entropies.map(|e| if e <= average { 1.0 } else { 0.0 })
}

/// Binary fusion weights of four normalized maps.
pub fn entropy_weights(maps: &[SaliencyMap; GROUPS]) -> [f64; GROUPS] {
    weights_from_entropies(&std::array::from_fn(|q| map_entropy(&maps[q])))
}

/// Weighted average `Σ w_q S_q / Σ w_q`, normalized to `[0, 1]`.
pub fn fuse_maps(maps: &[SaliencyMap], weights: &[f64]) -> Result<SaliencyMap> {
    assert_eq!(maps.len(), weights.len());
    let (w, h) = (maps[0].width(), maps[0].height());
    for m in maps {
        m.same_size(w, h)?;
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::Config("fusion weights sum to zero".into()));
    }
    let mut acc = vec![0.0; w * h];
    for (m, &wq) in maps.iter().zip(weights) {
        if wq == 0.0 {
            continue;
        }
        for (a, v) in acc.iter_mut().zip(m.values()) {
            *a += wq * v;
        }
    }
    for a in &mut acc {
        *a /= total;
    }
    normalize_map(&SaliencyMap::new(w, h, acc)?)
}

/// Intermediate products of one single-scale run.
#[derive(Debug, Clone)]
pub struct DistanceMaps {
    /// Raw distances `d_q`.
    pub distances: Vec<SaliencyMap>,
    /// Thresholded and normalized maps `S_q^th`.
    pub thresholded: Vec<SaliencyMap>,
    pub entropies: [f64; GROUPS],
    pub weights: [f64; GROUPS],
}

/// Parameters of the coarse stage.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SbdConfig {
    pub patch_size: usize,
    /// Border band width; `None` means `patch_size`.
    pub border_width: Option<usize>,
    pub scales: Vec<f64>,
    pub eig_floor: EigenFloor,
}

impl Default for SbdConfig {
    fn default() -> Self {
        Self {
            patch_size: 7,
            border_width: None,
            scales: vec![1.0, 0.5, 0.25],
            eig_floor: EigenFloor::default(),
        }
    }
}

impl SbdConfig {
    pub fn border(&self) -> usize {
        self.border_width.unwrap_or(self.patch_size)
    }

    /// Whether a `width x height` image satisfies every precondition of the
    /// single-scale stage.
    pub fn accepts(&self, width: usize, height: usize) -> bool {
        let side = width.min(height);
        side >= MIN_IMAGE_SIDE && self.patch_size <= side && self.border() >= 1 && 2 * self.border() < side
    }
}

/// Single-scale coarse map together with its intermediates.
pub fn coarse_saliency_detailed(img: &RgbImage, cfg: &SbdConfig) -> Result<(SaliencyMap, DistanceMaps)> {
    let mc = to_multichannel(img);
    let grid = extract_patch_features(&mc, cfg.patch_size)?;
    let groups = select_border_groups(&grid, cfg.border())?;
    let models = groups
        .groups
        .par_iter()
        .map(|g| BackgroundModel::fit_grid(&grid, g, cfg.eig_floor))
        .collect::<Result<Vec<_>>>()?;
    let distances = distance_maps(&grid, &models)?;
    let thresholded = distances
        .iter()
        .map(threshold_distance_map)
        .collect::<Result<Vec<_>>>()?;
    let entropies: [f64; GROUPS] = std::array::from_fn(|q| map_entropy(&thresholded[q]));
    let weights = weights_from_entropies(&entropies);
    let fused = fuse_maps(&thresholded, &weights)?;
    Ok((
        fused,
        DistanceMaps {
            distances,
            thresholded,
            entropies,
            weights,
        },
    ))
}

/// Single-scale coarse saliency map `S^cs`.
pub fn coarse_saliency_single_scale(img: &RgbImage, cfg: &SbdConfig) -> Result<SaliencyMap> {
    coarse_saliency_detailed(img, cfg).map(|(m, _)| m)
}

/// Averages per-scale maps at full resolution and renormalizes.
pub fn average_scales(maps: &[SaliencyMap], width: usize, height: usize) -> Result<SaliencyMap> {
    if maps.is_empty() {
        return Err(Error::Config("no scale produced a map".into()));
    }
    let mut acc = vec![0.0; width * height];
    for m in maps {
        let r = resize_map(m, width, height);
        for (a, v) in acc.iter_mut().zip(r.values()) {
            *a += v;
        }
    }
    let n = maps.len() as f64;
    for a in &mut acc {
        *a /= n;
    }
    normalize_map(&SaliencyMap::new(width, height, acc)?)
}

/// Multi-scale coarse saliency map `S^cm`. Scales whose downscaled image
/// violates a size precondition are skipped; the full scale must succeed.
pub fn coarse_saliency_multiscale(img: &RgbImage, cfg: &SbdConfig) -> Result<SaliencyMap> {
    let (w, h) = (img.width(), img.height());
    if !cfg.accepts(w, h) {
        // Surface the precise precondition failure.
        let mut full = cfg.clone();
        full.scales = vec![1.0];
        return coarse_saliency_single_scale(img, &full);
    }
    let usable: Vec<f64> = cfg
        .scales
        .iter()
        .copied()
        .filter(|&r| {
            let ok = r > 0.0
                && r <= 1.0
                && cfg.accepts(crate::imagecore::scaled_len(w, r), crate::imagecore::scaled_len(h, r));
            if !ok {
                warn!("skipping scale {r} for a {w}x{h} image");
            }
            ok
        })
        .collect();
    if usable.is_empty() {
        return Err(Error::Config(format!("no usable scale for a {w}x{h} image")));
    }
    let levels = build_pyramid(img, &usable)?;
    let maps = levels
        .par_iter()
        .map(|level| coarse_saliency_single_scale(level, cfg))
        .collect::<Result<Vec<_>>>()?;
    average_scales(&maps, w, h)
}
