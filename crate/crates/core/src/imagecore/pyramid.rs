use super::{RgbImage, MIN_IMAGE_SIDE};
use crate::error::{Error, Result};

/// Source coordinate and interpolation weight for each destination index,
/// aligned on pixel centers.
pub(crate) fn bilinear_taps(src: usize, dst: usize) -> Vec<(usize, usize, f64)> {
    let ratio = src as f64 / dst as f64;
    (0..dst)
        .map(|i| {
            let s = ((i as f64 + 0.5) * ratio - 0.5).clamp(0.0, (src - 1) as f64);
            let lo = s.floor() as usize;
            let hi = (lo + 1).min(src - 1);
            (lo, hi, s - lo as f64)
        })
        .collect()
}

/// Scaled side length for `ratio`.
pub fn scaled_len(len: usize, ratio: f64) -> usize {
    (len as f64 * ratio).round() as usize
}

/// Bilinear resampling of an RGB image to `width x height`.
pub fn downscale(img: &RgbImage, width: usize, height: usize) -> Result<RgbImage> {
    if width == img.width() && height == img.height() {
        return Ok(img.clone());
    }
    let xs = bilinear_taps(img.width(), width);
    let ys = bilinear_taps(img.height(), height);
    let mut data = Vec::with_capacity(width * height * 3);
    for &(y0, y1, fy) in &ys {
        for &(x0, x1, fx) in &xs {
            let p00 = img.pixel(x0, y0);
            let p10 = img.pixel(x1, y0);
            let p01 = img.pixel(x0, y1);
            let p11 = img.pixel(x1, y1);
            for c in 0..3 {
                let top = p00[c] as f64 * (1.0 - fx) + p10[c] as f64 * fx;
                let bot = p01[c] as f64 * (1.0 - fx) + p11[c] as f64 * fx;
                let v = top * (1.0 - fy) + bot * fy;
                data.push(v.round().clamp(0.0, 255.0) as u8);
            }
        }
    }
    RgbImage::new(width, height, data)
}

/// One bilinearly downscaled copy of `img` per ratio. A ratio of 1.0 returns
/// the input unchanged.
pub fn build_pyramid(img: &RgbImage, scales: &[f64]) -> Result<Vec<RgbImage>> {
    scales
        .iter()
        .map(|&ratio| {
            if !(ratio > 0.0 && ratio <= 1.0) {
                return Err(Error::InvalidScale(ratio));
            }
            let w = scaled_len(img.width(), ratio);
            let h = scaled_len(img.height(), ratio);
            if w < MIN_IMAGE_SIDE || h < MIN_IMAGE_SIDE {
                return Err(Error::ImageTooSmall {
                    width: w,
                    height: h,
                    min: MIN_IMAGE_SIDE,
                });
            }
            downscale(img, w, h)
        })
        .collect()
}
