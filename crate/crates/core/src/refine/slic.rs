//! Compact superpixels by local k-means in (Lab, x, y) followed by
//! connectivity enforcement.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::imagecore::{srgb_to_lab, Plane, RgbImage};

/// Spatial weight relative to Lab distance.
pub const DEFAULT_COMPACTNESS: f64 = 10.0;
pub const DEFAULT_ITERATIONS: usize = 10;

/// Smallest average superpixel area accepted, in pixels.
const MIN_AREA: usize = 4;

/// Per-pixel superpixel labels `0..count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Superpixels {
    width: usize,
    height: usize,
    labels: Vec<usize>,
    count: usize,
}

impl Superpixels {
    /// Wraps an existing labeling. Labels must cover `0..count` with no gaps.
    pub fn new(width: usize, height: usize, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != width * height {
            return Err(Error::BufferSize {
                expected: width * height,
                actual: labels.len(),
            });
        }
        let count = labels.iter().max().map_or(0, |m| m + 1);
        let mut seen = vec![false; count];
        for &l in &labels {
            seen[l] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Config("superpixel labels are not contiguous".into()));
        }
        Ok(Self {
            width,
            height,
            labels,
            count,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.count];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }
}

#[derive(Debug, Clone, Copy)]
struct Center {
    l: f64,
    a: f64,
    b: f64,
    x: f64,
    y: f64,
}

fn color_dist2(lab: [&Plane; 3], i: usize, c: &Center) -> f64 {
    let dl = lab[0].data[i] - c.l;
    let da = lab[1].data[i] - c.a;
    let db = lab[2].data[i] - c.b;
    dl * dl + da * da + db * db
}

fn gradient(lab: [&Plane; 3], x: usize, y: usize) -> f64 {
    let (w, h) = (lab[0].width, lab[0].height);
    let (xl, xr) = (x.saturating_sub(1), (x + 1).min(w - 1));
    let (yu, yd) = (y.saturating_sub(1), (y + 1).min(h - 1));
    lab.iter()
        .map(|p| {
            let gx = p.get(xr, y) - p.get(xl, y);
            let gy = p.get(x, yd) - p.get(x, yu);
            gx * gx + gy * gy
        })
        .sum()
}

/// SLIC over precomputed Lab planes.
pub fn slic(lab: [&Plane; 3], n_target: usize, compactness: f64, iterations: usize) -> Result<Superpixels> {
    let (w, h) = (lab[0].width, lab[0].height);
    if n_target < 2 {
        return Err(Error::Config(format!(
            "superpixel target must be at least 2, got {n_target}"
        )));
    }
    if n_target * MIN_AREA > w * h {
        return Err(Error::TooManySuperpixels {
            target: n_target,
            width: w,
            height: h,
        });
    }

    let step = ((w * h) as f64 / n_target as f64).sqrt();
    let nx = ((w as f64 / step).round() as usize).clamp(1, w);
    let ny = ((h as f64 / step).round() as usize).clamp(1, h);
    let cell_w = w as f64 / nx as f64;
    let cell_h = h as f64 / ny as f64;
    let s = cell_w.max(cell_h);

    let mut centers = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let cx = (((i as f64 + 0.5) * cell_w) as usize).min(w - 1);
            let cy = (((j as f64 + 0.5) * cell_h) as usize).min(h - 1);
            // Move the seed off edges: lowest gradient in the 3x3 neighborhood.
            let (mut bx, mut by, mut bg) = (cx, cy, gradient(lab, cx, cy));
            for y in cy.saturating_sub(1)..=(cy + 1).min(h - 1) {
                for x in cx.saturating_sub(1)..=(cx + 1).min(w - 1) {
                    let g = gradient(lab, x, y);
                    if g < bg {
                        (bx, by, bg) = (x, y, g);
                    }
                }
            }
            let k = by * w + bx;
            centers.push(Center {
                l: lab[0].data[k],
                a: lab[1].data[k],
                b: lab[2].data[k],
                x: bx as f64,
                y: by as f64,
            });
        }
    }

    let spatial = (compactness / s).powi(2);
    let radius = (2.0 * s).ceil() as isize;
    let mut labels = vec![usize::MAX; w * h];
    let mut best = vec![f64::INFINITY; w * h];

    for _ in 0..iterations.max(1) {
        best.fill(f64::INFINITY);
        labels.fill(usize::MAX);
        for (k, c) in centers.iter().enumerate() {
            let x0 = (c.x.round() as isize - radius).max(0) as usize;
            let x1 = ((c.x.round() as isize + radius) as usize).min(w - 1);
            let y0 = (c.y.round() as isize - radius).max(0) as usize;
            let y1 = ((c.y.round() as isize + radius) as usize).min(h - 1);
            for y in y0..=y1 {
                for x in x0..=x1 {
                    let i = y * w + x;
                    let dx = x as f64 - c.x;
                    let dy = y as f64 - c.y;
                    let d = color_dist2(lab, i, c) + (dx * dx + dy * dy) * spatial;
                    if d < best[i] {
                        best[i] = d;
                        labels[i] = k;
                    }
                }
            }
        }
        // Pixels outside every window after centers drift.
        for (i, label) in labels.iter_mut().enumerate() {
            if *label == usize::MAX {
                let (x, y) = ((i % w) as f64, (i / w) as f64);
                *label = centers
                    .iter()
                    .enumerate()
                    .map(|(k, c)| {
                        (
                            k,
                            color_dist2(lab, i, c) + ((x - c.x).powi(2) + (y - c.y).powi(2)) * spatial,
                        )
                    })
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .map(|(k, _)| k)
                    .expect("at least one center");
            }
        }

        let mut sums = vec![[0.0f64; 6]; centers.len()];
        for (i, &k) in labels.iter().enumerate() {
            let s = &mut sums[k];
            s[0] += lab[0].data[i];
            s[1] += lab[1].data[i];
            s[2] += lab[2].data[i];
            s[3] += (i % w) as f64;
            s[4] += (i / w) as f64;
            s[5] += 1.0;
        }
        for (c, s) in centers.iter_mut().zip(&sums) {
            if s[5] > 0.0 {
                *c = Center {
                    l: s[0] / s[5],
                    a: s[1] / s[5],
                    b: s[2] / s[5],
                    x: s[3] / s[5],
                    y: s[4] / s[5],
                };
            }
        }
    }

    // Fragments below a quarter cell are merged; on busy textures keep raising
    // the bar until the count is within 1.5x of the target.
    let max_count = n_target + n_target / 2;
    let mut min_size = ((s * s) as usize / 4).max(1);
    let mut merged = enforce_connectivity(&labels, w, h, min_size);
    while count_labels(&merged) > max_count && min_size < w * h {
        min_size *= 2;
        merged = enforce_connectivity(&merged, w, h, min_size);
    }
    Superpixels::new(w, h, merged)
}

fn count_labels(labels: &[usize]) -> usize {
    labels.iter().max().map_or(0, |m| m + 1)
}

/// Relabels 4-connected components consecutively and merges components
/// smaller than `min_size` into the previously labeled neighbor.
pub fn enforce_connectivity(labels: &[usize], w: usize, h: usize, min_size: usize) -> Vec<usize> {
    let mut out = vec![usize::MAX; w * h];
    let mut next = 0;
    let mut queue = VecDeque::new();
    let mut members = Vec::new();
    for start in 0..w * h {
        if out[start] != usize::MAX {
            continue;
        }
        let (sx, sy) = (start % w, start / w);
        let adjacent = [
            (sx > 0).then(|| start - 1),
            (sy > 0).then(|| start - w),
            (sx + 1 < w).then(|| start + 1),
            (sy + 1 < h).then(|| start + w),
        ]
        .into_iter()
        .flatten()
        .map(|n| out[n])
        .find(|&l| l != usize::MAX);

        let original = labels[start];
        members.clear();
        out[start] = next;
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            members.push(i);
            let (x, y) = (i % w, i / w);
            let neighbors = [
                (x > 0).then(|| i - 1),
                (y > 0).then(|| i - w),
                (x + 1 < w).then(|| i + 1),
                (y + 1 < h).then(|| i + w),
            ];
            for n in neighbors.into_iter().flatten() {
                if out[n] == usize::MAX && labels[n] == original {
                    out[n] = next;
                    queue.push_back(n);
                }
            }
        }
        match adjacent {
            Some(adj) if members.len() < min_size => {
                for &i in &members {
                    out[i] = adj;
                }
            }
            _ => next += 1,
        }
    }
    out
}

/// Superpixels of an RGB image with default compactness and iterations.
pub fn superpixel_segment(img: &RgbImage, n_target: usize) -> Result<Superpixels> {
    let lab = srgb_to_lab(img);
    slic(
        [&lab[0], &lab[1], &lab[2]],
        n_target,
        DEFAULT_COMPACTNESS,
        DEFAULT_ITERATIONS,
    )
}
