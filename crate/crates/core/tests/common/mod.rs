//! Independent oracles and synthetic inputs shared by the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sbdsal_core::refine::Edge;
use sbdsal_core::RgbImage;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random SPD matrix `AᵀA / n + shift I`.
pub fn random_spd(rng: &mut impl Rng, n: usize, shift: f64) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    a.transpose() * &a / n as f64 + DMatrix::identity(n, n) * shift
}

pub fn random_symmetric(rng: &mut impl Rng, n: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-10.0..10.0));
    (&a + a.transpose()) * 0.5
}

/// `C^{-1/2}` by the Denman–Beavers iteration (no eigendecomposition).
pub fn inverse_sqrt(c: &DMatrix<f64>) -> DMatrix<f64> {
    let n = c.nrows();
    let mut y = c.clone();
    let mut z = DMatrix::identity(n, n);
    for _ in 0..100 {
        let y_inv = y.clone().try_inverse().expect("SPD iterate is invertible");
        let z_inv = z.clone().try_inverse().expect("SPD iterate is invertible");
        let y_next = (&y + z_inv) * 0.5;
        let z_next = (&z + y_inv) * 0.5;
        let delta = (&y_next - &y).norm() / y_next.norm();
        y = y_next;
        z = z_next;
        if delta < 1e-15 {
            break;
        }
    }
    z
}

/// Floyd–Warshall over an undirected edge list.
pub fn floyd_warshall(n: usize, edges: &[Edge]) -> Vec<f64> {
    let mut d = vec![f64::INFINITY; n * n];
    for i in 0..n {
        d[i * n + i] = 0.0;
    }
    for e in edges {
        let w = e.weight.min(d[e.a * n + e.b]);
        d[e.a * n + e.b] = w;
        d[e.b * n + e.a] = w;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i * n + k] + d[k * n + j];
                if via < d[i * n + j] {
                    d[i * n + j] = via;
                }
            }
        }
    }
    d
}

/// Random connected graph: a random spanning tree plus extra edges.
pub fn random_connected_graph(rng: &mut impl Rng, n: usize) -> Vec<Edge> {
    let mut edges = Vec::new();
    for v in 1..n {
        let u = rng.random_range(0..v);
        edges.push(Edge {
            a: u,
            b: v,
            weight: rng.random_range(0.0..10.0),
        });
    }
    let extra = rng.random_range(0..=n);
    for _ in 0..extra {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if a != b {
            edges.push(Edge {
                a,
                b,
                weight: rng.random_range(0.0..10.0),
            });
        }
    }
    edges
}

/// Mann–Whitney estimate of AUC: fraction of (positive, negative) pairs
/// ranked correctly, ties counting one half.
pub fn rank_auc(scores: &[f64], labels: &[bool]) -> f64 {
    let pos: Vec<f64> = scores.iter().zip(labels).filter(|(_, &l)| l).map(|(&s, _)| s).collect();
    let neg: Vec<f64> = scores
        .iter()
        .zip(labels)
        .filter(|(_, &l)| !l)
        .map(|(&s, _)| s)
        .collect();
    let mut wins = 0.0;
    for p in &pos {
        for q in &neg {
            wins += if p > q {
                1.0
            } else if p == q {
                0.5
            } else {
                0.0
            };
        }
    }
    wins / (pos.len() * neg.len()) as f64
}

pub const GRAY: [u8; 3] = [128, 128, 128];
pub const RED: [u8; 3] = [255, 0, 0];

/// `size x size` background with a centered `side x side` square.
pub fn centered_square(size: usize, side: usize, bg: [u8; 3], fg: [u8; 3]) -> RgbImage {
    square_at(size, size, (size - side) / 2, (size - side) / 2, side, bg, fg)
}

pub fn square_at(w: usize, h: usize, x0: usize, y0: usize, side: usize, bg: [u8; 3], fg: [u8; 3]) -> RgbImage {
    RgbImage::from_fn(w, h, |x, y| {
        if (x0..x0 + side).contains(&x) && (y0..y0 + side).contains(&y) {
            fg
        } else {
            bg
        }
    })
    .unwrap()
}

/// Mean of `values` inside the centered square and over the border band.
pub fn square_and_band_means(values: &[f64], size: usize, side: usize, band: usize) -> (f64, f64) {
    let lo = (size - side) / 2;
    let (mut inside, mut ni, mut border, mut nb) = (0.0, 0usize, 0.0, 0usize);
    for y in 0..size {
        for x in 0..size {
            let v = values[y * size + x];
            if (lo..lo + side).contains(&x) && (lo..lo + side).contains(&y) {
                inside += v;
                ni += 1;
            }
            if x < band || y < band || x >= size - band || y >= size - band {
                border += v;
                nb += 1;
            }
        }
    }
    (inside / ni as f64, border / nb as f64)
}

/// Twenty synthetic images: squares, gradients, noise and constants.
pub fn synthetic_suite() -> Vec<(String, RgbImage)> {
    let mut out = Vec::new();
    let mut r = rng(20);

    out.push(("red-on-gray".into(), centered_square(96, 30, GRAY, RED)));
    out.push((
        "blue-on-white".into(),
        centered_square(80, 24, [255, 255, 255], [20, 40, 220]),
    ));
    out.push((
        "dark-on-light".into(),
        centered_square(72, 40, [210, 200, 190], [30, 30, 30]),
    ));
    out.push((
        "off-center".into(),
        square_at(100, 80, 10, 30, 25, [90, 140, 90], [250, 220, 0]),
    ));
    out.push((
        "touching-border".into(),
        square_at(90, 90, 0, 20, 35, [60, 60, 120], [240, 120, 40]),
    ));
    out.push((
        "large-object".into(),
        centered_square(64, 52, [200, 200, 200], [180, 30, 60]),
    ));
    out.push((
        "tiny-object".into(),
        centered_square(120, 6, [100, 110, 120], [255, 255, 0]),
    ));

    out.push((
        "horizontal-gradient".into(),
        RgbImage::from_fn(96, 64, |x, _| {
            let v = (x * 255 / 95) as u8;
            [v, v, v]
        })
        .unwrap(),
    ));
    out.push((
        "diagonal-color-gradient".into(),
        RgbImage::from_fn(80, 80, |x, y| {
            [(x * 3) as u8, (y * 3) as u8, ((x + y) as u8).wrapping_mul(2)]
        })
        .unwrap(),
    ));
    out.push((
        "radial-gradient".into(),
        RgbImage::from_fn(70, 70, |x, y| {
            let d = (((x as f64 - 35.0).powi(2) + (y as f64 - 35.0).powi(2)).sqrt() * 7.0).min(255.0) as u8;
            [255 - d, 128, d]
        })
        .unwrap(),
    ));

    for (k, (w, h)) in [(64, 64), (96, 72), (50, 80)].into_iter().enumerate() {
        let data: Vec<u8> = (0..w * h * 3).map(|_| r.random()).collect();
        out.push((format!("uniform-noise-{k}"), RgbImage::new(w, h, data).unwrap()));
    }
    {
        let (w, h) = (90usize, 90usize);
        let img = RgbImage::from_fn(w, h, |x, y| {
            let inside = (30..60).contains(&x) && (30..60).contains(&y);
            let base = if inside { [220i32, 40, 40] } else { [120, 120, 120] };
            let jitter = r.random_range(-25i32..=25);
            base.map(|c| (c + jitter).clamp(0, 255) as u8)
        })
        .unwrap();
        out.push(("noisy-square".into(), img));
    }

    out.push(("constant-gray".into(), RgbImage::from_fn(48, 48, |_, _| GRAY).unwrap()));
    out.push(("constant-red".into(), RgbImage::from_fn(64, 40, |_, _| RED).unwrap()));
    out.push((
        "constant-black".into(),
        RgbImage::from_fn(16, 16, |_, _| [0, 0, 0]).unwrap(),
    ));

    out.push((
        "checkerboard".into(),
        RgbImage::from_fn(64, 64, |x, y| {
            if (x / 8 + y / 8) % 2 == 0 {
                [0, 0, 0]
            } else {
                [255, 255, 255]
            }
        })
        .unwrap(),
    ));
    out.push((
        "two-objects".into(),
        RgbImage::from_fn(110, 70, |x, y| {
            if (15..35).contains(&x) && (20..45).contains(&y) {
                [0, 200, 0]
            } else if (70..95).contains(&x) && (25..50).contains(&y) {
                [200, 0, 200]
            } else {
                [140, 130, 120]
            }
        })
        .unwrap(),
    ));
    out.push((
        "stripes".into(),
        RgbImage::from_fn(60, 60, |_, y| if (y / 5) % 2 == 0 { [255, 0, 0] } else { [0, 0, 255] }).unwrap(),
    ));

    assert_eq!(out.len(), 20);
    out
}
