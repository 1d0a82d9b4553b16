//! Image containers, color conversion, pyramids, dense patch features and
//! generic map utilities.

mod color;
mod map;
mod patch;
mod pyramid;

use std::path::Path;

use crate::error::{Error, Result};

pub use color::{rgb_pixel_to_irgby, rgb_pixel_to_lab, rgb_to_irgby, srgb_to_lab, to_multichannel};
pub use map::{map_entropy, normalize_map, resize_map, BinaryMask, SaliencyMap, ENTROPY_BINS};
pub use patch::{extract_patch_features, PatchFeatureGrid};
pub use pyramid::{build_pyramid, downscale, scaled_len};

/// Smallest side length any stage of the pipeline accepts.
pub const MIN_IMAGE_SIDE: usize = 16;

/// Number of feature channels: L, a, b, I, RG, BY.
pub const CHANNELS: usize = 6;

/// An 8-bit interleaved RGB image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl RgbImage {
    /// Wraps an interleaved RGB buffer. Both sides must be at least
    /// [`MIN_IMAGE_SIDE`].
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if width < MIN_IMAGE_SIDE || height < MIN_IMAGE_SIDE {
            return Err(Error::ImageTooSmall {
                width,
                height,
                min: MIN_IMAGE_SIDE,
            });
        }
        if data.len() != width * height * 3 {
            return Err(Error::BufferSize {
                expected: width * height * 3,
                actual: data.len(),
            });
        }
        Ok(Self { width, height, data })
    }

    /// Builds an image by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> [u8; 3]) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height * 3);
        for y in 0..height {
            for x in 0..width {
                data.extend_from_slice(&f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let img = image::open(path)?.to_rgb8();
        let (w, h) = img.dimensions();
        Self::new(w as usize, h as usize, img.into_raw())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn pixels(&self) -> impl Iterator<Item = [u8; 3]> + '_ {
        self.data.chunks_exact(3).map(|c| [c[0], c[1], c[2]])
    }
}

/// A single row-major `f64` plane.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f64>,
}

impl Plane {
    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![0.0; width * height],
        }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }
}

/// Six float planes in the order L, a, b, I, RG, BY.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiChannelImage {
    width: usize,
    height: usize,
    planes: [Plane; CHANNELS],
}

impl MultiChannelImage {
    /// # Panics
    /// If the planes do not share dimensions.
    pub fn from_planes(planes: [Plane; CHANNELS]) -> Self {
        let (width, height) = (planes[0].width, planes[0].height);
        assert!(
            planes
                .iter()
                .all(|p| p.width == width && p.height == height && p.data.len() == width * height),
            "all channel planes must share dimensions"
        );
        Self { width, height, planes }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn planes(&self) -> &[Plane; CHANNELS] {
        &self.planes
    }

    /// The Lab planes `[L, a, b]`.
    pub fn lab(&self) -> [&Plane; 3] {
        [&self.planes[0], &self.planes[1], &self.planes[2]]
    }
}
