use super::{MultiChannelImage, CHANNELS};
use crate::error::{Error, Result};

/// Dense per-pixel patch descriptors.
///
/// Every pixel is a patch center (stride 1); neighbors outside the image are
/// taken from the nearest edge pixel. The descriptor of pixel `i` is the
/// concatenation, channel by channel, of its `patch x patch` neighborhood in
/// row-major order, so `dim = 6 * patch^2`.
///
/// Descriptors are materialized on demand from edge-padded planes, which keeps
/// memory at `O(pixels * channels)` instead of `O(pixels * dim)`.
#[derive(Debug, Clone)]
pub struct PatchFeatureGrid {
    width: usize,
    height: usize,
    patch: usize,
    padded_width: usize,
    padded: Vec<Vec<f64>>,
}

impl PatchFeatureGrid {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn patch_size(&self) -> usize {
        self.patch
    }

    pub fn dim(&self) -> usize {
        CHANNELS * self.patch * self.patch
    }

    /// Number of descriptors, one per pixel.
    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Writes the descriptor of the pixel with linear index `idx` into `out`.
    ///
    /// # Panics
    /// If `out.len() != self.dim()` or `idx` is out of range.
    pub fn write_feature(&self, idx: usize, out: &mut [f64]) {
        assert_eq!(out.len(), self.dim());
        let (x, y) = (idx % self.width, idx / self.width);
        assert!(y < self.height, "patch index out of range");
        let p = self.patch;
        let mut k = 0;
        for plane in &self.padded {
            for dy in 0..p {
                let row = (y + dy) * self.padded_width + x;
                out[k..k + p].copy_from_slice(&plane[row..row + p]);
                k += p;
            }
        }
    }

    pub fn feature(&self, idx: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.dim()];
        self.write_feature(idx, &mut v);
        v
    }
}

/// Builds the dense descriptor grid for odd `patch_size >= 3`.
pub fn extract_patch_features(mc: &MultiChannelImage, patch_size: usize) -> Result<PatchFeatureGrid> {
    let (w, h) = (mc.width(), mc.height());
    if patch_size < 3 || patch_size % 2 == 0 || patch_size > w.min(h) {
        return Err(Error::InvalidPatchSize {
            size: patch_size,
            width: w,
            height: h,
        });
    }
    let r = patch_size / 2;
    let pw = w + 2 * r;
    let ph = h + 2 * r;
    let padded = mc
        .planes()
        .iter()
        .map(|plane| {
            let mut out = Vec::with_capacity(pw * ph);
            for py in 0..ph {
                let y = py.saturating_sub(r).min(h - 1);
                for px in 0..pw {
                    let x = px.saturating_sub(r).min(w - 1);
                    out.push(plane.get(x, y));
                }
            }
            out
        })
        .collect();
    Ok(PatchFeatureGrid {
        width: w,
        height: h,
        patch: patch_size,
        padded_width: pw,
        padded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imagecore::Plane;

    fn ramp(w: usize, h: usize) -> MultiChannelImage {
        let planes = std::array::from_fn(|c| Plane {
            width: w,
            height: h,
            data: (0..w * h).map(|i| (c * 100 + i) as f64).collect(),
        });
        MultiChannelImage::from_planes(planes)
    }

    #[test]
    fn default_patch_gives_294() {
        let g = extract_patch_features(&ramp(20, 20), 7).unwrap();
        assert_eq!(g.dim(), 294);
        assert_eq!(g.feature(0).len(), 294);
        assert_eq!(g.len(), 400);
    }

    #[test]
    fn center_of_3x3_ramp() {
        let g = extract_patch_features(&ramp(3, 3), 3).unwrap();
        let f = g.feature(4);
        let expected: Vec<f64> = (0..6).flat_map(|c| (0..9).map(move |i| (c * 100 + i) as f64)).collect();
        assert_eq!(f, expected);
    }

    #[test]
    fn corner_uses_edge_replication() {
        let g = extract_patch_features(&ramp(3, 3), 3).unwrap();
        let f = g.feature(0);
        // Channel 0 neighborhood of (0,0) with clamped coordinates.
        assert_eq!(&f[..9], &[0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 3.0, 3.0, 4.0]);
    }

    #[test]
    fn constant_image_gives_identical_features() {
        let planes = std::array::from_fn(|c| Plane {
            width: 9,
            height: 8,
            data: vec![c as f64 * 3.5; 72],
        });
        let g = extract_patch_features(&MultiChannelImage::from_planes(planes), 5).unwrap();
        let first = g.feature(0);
        assert!((0..g.len()).all(|i| g.feature(i) == first));
    }

    #[test]
    fn invalid_patch_sizes() {
        let mc = ramp(10, 6);
        for p in [0, 1, 2, 4, 7] {
            assert!(matches!(
                extract_patch_features(&mc, p),
                Err(Error::InvalidPatchSize { .. })
            ));
        }
        assert!(extract_patch_features(&mc, 5).is_ok());
    }
}
