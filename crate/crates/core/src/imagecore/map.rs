use std::path::Path;

use super::pyramid::bilinear_taps;
use crate::error::{Error, Result};

/// Number of histogram bins used by [`map_entropy`].
pub const ENTROPY_BINS: usize = 256;

/// Single-channel float map with the dimensions of its source image.
#[derive(Debug, Clone, PartialEq)]
pub struct SaliencyMap {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl SaliencyMap {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != width * height {
            return Err(Error::BufferSize {
                expected: width * height,
                actual: values.len(),
            });
        }
        Ok(Self { width, height, values })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        Self {
            width,
            height,
            values: vec![value; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    pub fn mean(&self) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    pub fn same_size(&self, other_w: usize, other_h: usize) -> Result<()> {
        if self.width != other_w || self.height != other_h {
            return Err(Error::SizeMismatch(self.width, self.height, other_w, other_h));
        }
        Ok(())
    }

    /// 8-bit quantization `round(255 * v)`, clamped.
    pub fn to_gray8(&self) -> Vec<u8> {
        self.values
            .iter()
            .map(|&v| (v * 255.0).round().clamp(0.0, 255.0) as u8)
            .collect()
    }

    /// Writes the map as an 8-bit grayscale PNG.
    pub fn save_png(&self, path: impl AsRef<Path>) -> Result<()> {
        let buf = image::GrayImage::from_raw(self.width as u32, self.height as u32, self.to_gray8())
            .expect("buffer length matches dimensions");
        buf.save_with_format(path, image::ImageFormat::Png)?;
        Ok(())
    }

    /// Reads a grayscale image as a map with values `v / 255`.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let img = image::open(path)?.to_luma8();
        let (w, h) = img.dimensions();
        let values = img.into_raw().into_iter().map(|v| v as f64 / 255.0).collect();
        Self::new(w as usize, h as usize, values)
    }
}

/// Binary ground-truth or foreground mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, data: Vec<bool>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::BufferSize {
                expected: width * height,
                actual: data.len(),
            });
        }
        Ok(Self { width, height, data })
    }

    /// Loads a mask from a single-channel image; values above 127 are foreground.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let img = image::open(path)?.to_luma8();
        let (w, h) = img.dimensions();
        let data = img.into_raw().into_iter().map(|v| v > 127).collect();
        Self::new(w as usize, h as usize, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }
}

/// Affine rescale to `[0, 1]`. A constant map becomes all zeros.
pub fn normalize_map(m: &SaliencyMap) -> Result<SaliencyMap> {
    if let Some(i) = m.values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    let (lo, hi) = m.min_max();
    let values = if m.values.is_empty() || hi <= lo {
        vec![0.0; m.values.len()]
    } else {
        let span = hi - lo;
        m.values.iter().map(|&v| ((v - lo) / span).clamp(0.0, 1.0)).collect()
    };
    Ok(SaliencyMap {
        width: m.width,
        height: m.height,
        values,
    })
}

#[inline]
pub(crate) fn entropy_bin(v: f64) -> usize {
    ((v.clamp(0.0, 1.0) * ENTROPY_BINS as f64) as usize).min(ENTROPY_BINS - 1)
}

/// Shannon entropy (nats) of the 256-bin histogram of a `[0, 1]` map.
pub fn map_entropy(m: &SaliencyMap) -> f64 {
    if m.values.is_empty() {
        return 0.0;
    }
    let mut hist = [0usize; ENTROPY_BINS];
    for &v in &m.values {
        hist[entropy_bin(v)] += 1;
    }
    let n = m.values.len() as f64;
    hist.iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum::<f64>()
        .max(0.0)
}

/// Bilinear resampling to `width x height`, clamped to `[0, 1]`.
///
/// # Panics
/// If `width` or `height` is zero.
pub fn resize_map(m: &SaliencyMap, width: usize, height: usize) -> SaliencyMap {
    assert!(width >= 1 && height >= 1, "target size must be positive");
    if width == m.width && height == m.height {
        let values = m.values.iter().map(|v| v.clamp(0.0, 1.0)).collect();
        return SaliencyMap { width, height, values };
    }
    let xs = bilinear_taps(m.width, width);
    let ys = bilinear_taps(m.height, height);
    let mut values = Vec::with_capacity(width * height);
    for &(y0, y1, fy) in &ys {
        for &(x0, x1, fx) in &xs {
            let top = m.get(x0, y0) * (1.0 - fx) + m.get(x1, y0) * fx;
            let bot = m.get(x0, y1) * (1.0 - fx) + m.get(x1, y1) * fx;
            values.push((top * (1.0 - fy) + bot * fy).clamp(0.0, 1.0));
        }
    }
    SaliencyMap { width, height, values }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(values: &[f64]) -> SaliencyMap {
        SaliencyMap::new(values.len(), 1, values.to_vec()).unwrap()
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(
            normalize_map(&map(&[2.0, 4.0, 6.0])).unwrap().values(),
            &[0.0, 0.5, 1.0]
        );
        assert_eq!(normalize_map(&map(&[3.0; 5])).unwrap().values(), &[0.0; 5]);
        let unit = map(&[0.0, 0.25, 1.0, 0.7]);
        assert_eq!(normalize_map(&unit).unwrap(), unit);
    }

    #[test]
    fn normalize_rejects_nan() {
        assert!(matches!(
            normalize_map(&map(&[0.0, f64::NAN])),
            Err(Error::NonFinite(1))
        ));
        assert!(matches!(
            normalize_map(&map(&[f64::INFINITY])),
            Err(Error::NonFinite(0))
        ));
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(map_entropy(&map(&[0.3; 10])), 0.0);

        let mut half = vec![0.0; 50];
        half.extend(vec![1.0; 50]);
        assert!((map_entropy(&map(&half)) - 2f64.ln()).abs() < 1e-12);

        // One value at each bin center.
        let uniform: Vec<f64> = (0..256).map(|k| (k as f64 + 0.5) / 256.0).collect();
        assert!((map_entropy(&map(&uniform)) - 256f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn resize_identity_and_constant() {
        let m = SaliencyMap::new(3, 2, vec![0.0, 0.2, 0.4, 0.6, 0.8, 1.0]).unwrap();
        assert_eq!(resize_map(&m, 3, 2), m);
        let c = SaliencyMap::filled(5, 7, 0.5);
        let r = resize_map(&c, 13, 3);
        assert!(r.values().iter().all(|&v| (v - 0.5).abs() < 1e-15));
    }

    #[test]
    fn resize_keeps_left_to_right_order() {
        let m = SaliencyMap::new(2, 2, vec![0.0, 1.0, 0.0, 1.0]).unwrap();
        let r = resize_map(&m, 6, 2);
        for y in 0..2 {
            for x in 1..6 {
                assert!(r.get(x, y) >= r.get(x - 1, y));
            }
            assert!(r.get(5, y) > r.get(0, y));
        }
    }

    #[test]
    fn png_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.png");
        let values: Vec<f64> = (0..16 * 16).map(|i| (i as f64 * 0.37).sin().abs()).collect();
        let m = SaliencyMap::new(16, 16, values).unwrap();
        m.save_png(&path).unwrap();
        let back = SaliencyMap::open(&path).unwrap();
        for (a, b) in m.values().iter().zip(back.values()) {
            assert!((a - b).abs() <= 1.0 / 255.0);
        }
    }
}
