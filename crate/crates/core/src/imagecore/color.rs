//! sRGB to CIE-Lab (D65) and the opponent I-RG-BY channels.

use super::{MultiChannelImage, Plane, RgbImage};

// sRGB (D65) to XYZ.
const M: [[f64; 3]; 3] = [
    [0.412_456_4, 0.357_576_1, 0.180_437_5],
    [0.212_672_9, 0.715_152_2, 0.072_175_0],
    [0.019_333_9, 0.119_192_0, 0.950_304_1],
];

// Reference white as the image of RGB (1,1,1), so grays map to a = b = 0.
const XN: f64 = M[0][0] + M[0][1] + M[0][2];
const YN: f64 = M[1][0] + M[1][1] + M[1][2];
const ZN: f64 = M[2][0] + M[2][1] + M[2][2];

const EPSILON: f64 = 216.0 / 24389.0;
const KAPPA: f64 = 24389.0 / 27.0;

#[inline]
fn srgb_to_linear(c: u8) -> f64 {
    let v = c as f64 / 255.0;
    if v <= 0.040_45 {
        v / 12.92
    } else {
        ((v + 0.055) / 1.055).powf(2.4)
    }
}

#[inline]
fn lab_f(t: f64) -> f64 {
    if t > EPSILON {
        t.cbrt()
    } else {
        (KAPPA * t + 16.0) / 116.0
    }
}

/// Converts one sRGB triple to `(L, a, b)`.
pub fn rgb_pixel_to_lab(rgb: [u8; 3]) -> [f64; 3] {
    let r = srgb_to_linear(rgb[0]);
    let g = srgb_to_linear(rgb[1]);
    let b = srgb_to_linear(rgb[2]);

    let x = M[0][0] * r + M[0][1] * g + M[0][2] * b;
    let y = M[1][0] * r + M[1][1] * g + M[1][2] * b;
    let z = M[2][0] * r + M[2][1] * g + M[2][2] * b;

    let fx = lab_f(x / XN);
    let fy = lab_f(y / YN);
    let fz = lab_f(z / ZN);

    let l = 116.0 * fy - 16.0;
    let a = 500.0 * (fx - fy);
    let bb = 200.0 * (fy - fz);
    [l.max(0.0), a, bb]
}

/// Opponent channels computed on raw 8-bit values: `I = (R+G+B)/3`,
/// `RG = R-G`, `BY = B-(R+G)/2`.
#[inline]
pub fn rgb_pixel_to_irgby(rgb: [u8; 3]) -> [f64; 3] {
    let r = rgb[0] as f64;
    let g = rgb[1] as f64;
    let b = rgb[2] as f64;
    [(r + g + b) / 3.0, r - g, b - (r + g) / 2.0]
}

fn convert(img: &RgbImage, f: impl Fn([u8; 3]) -> [f64; 3]) -> [Plane; 3] {
    let (w, h) = (img.width(), img.height());
    let mut out = [Plane::zeros(w, h), Plane::zeros(w, h), Plane::zeros(w, h)];
    for (i, px) in img.pixels().enumerate() {
        let v = f(px);
        for c in 0..3 {
            out[c].data[i] = v[c];
        }
    }
    out
}

/// Per-pixel CIE-Lab planes `[L, a, b]`.
pub fn srgb_to_lab(img: &RgbImage) -> [Plane; 3] {
    convert(img, rgb_pixel_to_lab)
}

/// Per-pixel opponent planes `[I, RG, BY]`.
pub fn rgb_to_irgby(img: &RgbImage) -> [Plane; 3] {
    convert(img, rgb_pixel_to_irgby)
}

/// Stacks Lab and I-RG-BY into the six-channel feature image.
pub fn to_multichannel(img: &RgbImage) -> MultiChannelImage {
    let [l, a, b] = srgb_to_lab(img);
    let [i, rg, by] = rgb_to_irgby(img);
    MultiChannelImage::from_planes([l, a, b, i, rg, by])
}
