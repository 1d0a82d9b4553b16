//! Deterministic synthetic inputs for the benchmarks.

use sbdsal_core::RgbImage;

/// Gray `size x size` image with a centered saturated red square.
pub fn red_square(size: usize, side: usize) -> RgbImage {
    let lo = (size - side) / 2;
    RgbImage::from_fn(size, size, |x, y| {
        if (lo..lo + side).contains(&x) && (lo..lo + side).contains(&y) {
            [255, 0, 0]
        } else {
            [128, 128, 128]
        }
    })
    .expect("size is at least the minimum image side")
}

/// Smoothly varying background with a textured object, closer to a photo
/// than [`red_square`].
pub fn textured(width: usize, height: usize) -> RgbImage {
    RgbImage::from_fn(width, height, |x, y| {
        let (cx, cy) = (width as f64 / 2.0, height as f64 / 2.0);
        let r = ((x as f64 - cx).powi(2) + (y as f64 - cy).powi(2)).sqrt();
        let inside = r < width.min(height) as f64 / 4.0;
        let noise = ((x * 7919 + y * 104_729) % 31) as u8;
        if inside {
            [200u8.saturating_add(noise), 60 + noise, 40]
        } else {
            [90 + (x * 60 / width) as u8, 110 + (y * 60 / height) as u8, 140 + noise]
        }
    })
    .expect("size is at least the minimum image side")
}
