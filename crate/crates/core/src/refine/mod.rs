//! Superpixel refinement with geodesic weights.
//!
//! The posterior map is averaged inside each superpixel. Adjacent superpixels
//! are joined by edges weighted with the Lab distance of their mean colors,
//! and every superpixel takes a weighted average of all superpixel means with
//! weights `exp(-d_geo² / 2σ²)`, `d_geo` being the shortest-path distance on
//! that graph. Strong color edges along a path suppress the weight.

mod geodesic;
mod slic;

use std::collections::BTreeSet;

pub use geodesic::{all_pairs_shortest_paths, bridge_edges, components, edge_sigma, Edge, GeodesicMatrix, SIGMA_FLOOR};
pub use slic::{enforce_connectivity, slic, superpixel_segment, Superpixels, DEFAULT_COMPACTNESS, DEFAULT_ITERATIONS};

use crate::error::{Error, Result};
use crate::imagecore::{normalize_map, Plane, SaliencyMap};

/// Superpixel adjacency graph with per-superpixel statistics.
#[derive(Debug, Clone)]
pub struct SuperpixelGraph {
    superpixels: Superpixels,
    sizes: Vec<usize>,
    mean_lab: Vec<[f64; 3]>,
    mean_posterior: Vec<f64>,
    edges: Vec<Edge>,
}

impl SuperpixelGraph {
    /// Averages Lab color and posterior inside every superpixel and links
    /// 4-adjacent superpixels.
    pub fn build(superpixels: Superpixels, lab: [&Plane; 3], posterior: &SaliencyMap) -> Result<Self> {
        let (w, h) = (superpixels.width(), superpixels.height());
        posterior.same_size(w, h)?;
        for p in lab {
            if p.width != w || p.height != h {
                return Err(Error::SizeMismatch(p.width, p.height, w, h));
            }
        }
        let n = superpixels.count();
        let labels = superpixels.labels();
        let mut sizes = vec![0usize; n];
        let mut sums = vec![[0.0f64; 4]; n];
        for (i, &l) in labels.iter().enumerate() {
            sizes[l] += 1;
            let s = &mut sums[l];
            s[0] += lab[0].data[i];
            s[1] += lab[1].data[i];
            s[2] += lab[2].data[i];
            s[3] += posterior.values()[i];
        }
        let mean_lab: Vec<[f64; 3]> = sums
            .iter()
            .zip(&sizes)
            .map(|(s, &c)| {
                let c = c as f64;
                [s[0] / c, s[1] / c, s[2] / c]
            })
            .collect();
        let mean_posterior = sums.iter().zip(&sizes).map(|(s, &c)| s[3] / c as f64).collect();

        let mut pairs = BTreeSet::new();
        for y in 0..h {
            for x in 0..w {
                let a = labels[y * w + x];
                if x + 1 < w {
                    let b = labels[y * w + x + 1];
                    if a != b {
                        pairs.insert((a.min(b), a.max(b)));
                    }
                }
                if y + 1 < h {
                    let b = labels[(y + 1) * w + x];
                    if a != b {
                        pairs.insert((a.min(b), a.max(b)));
                    }
                }
            }
        }
        let edges = pairs
            .into_iter()
            .map(|(a, b)| Edge {
                a,
                b,
                weight: color_distance(&mean_lab[a], &mean_lab[b]),
            })
            .collect();

        Ok(Self {
            superpixels,
            sizes,
            mean_lab,
            mean_posterior,
            edges,
        })
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    pub fn superpixels(&self) -> &Superpixels {
        &self.superpixels
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn mean_lab(&self) -> &[[f64; 3]] {
        &self.mean_lab
    }

    /// `S̄(j)`, the mean posterior of each superpixel.
    pub fn mean_posterior(&self) -> &[f64] {
        &self.mean_posterior
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }
}

fn color_distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Geodesic distances over the superpixel graph. A disconnected graph is
/// first bridged with minimum-color-distance edges.
pub fn geodesic_distances(g: &SuperpixelGraph) -> GeodesicMatrix {
    let mut edges = g.edges.clone();
    let bridges = bridge_edges(&g.mean_lab, &edges);
    if !bridges.is_empty() {
        log::warn!("superpixel graph has {} extra components, bridging", bridges.len());
        edges.extend(bridges);
    }
    let n = g.len();
    GeodesicMatrix::new(n, all_pairs_shortest_paths(n, &edges), edge_sigma(&edges))
}

/// Row-normalized geodesic weights.
pub fn refine_weights(gd: &GeodesicMatrix) -> Vec<f64> {
    let n = gd.len();
    let two_sigma2 = 2.0 * gd.sigma() * gd.sigma();
    let mut w = Vec::with_capacity(n * n);
    for q in 0..n {
        let row: Vec<f64> = gd.row(q).iter().map(|d| (-(d * d) / two_sigma2).exp()).collect();
        // The diagonal contributes exp(0) = 1, so the sum is never zero.
        let total: f64 = row.iter().sum();
        w.extend(row.into_iter().map(|v| v / total));
    }
    w
}

/// `S(q) = Σ_j ŵ_qj S̄(j)` for every superpixel; a convex combination of
/// `mean_posterior`.
pub fn refine_superpixels(mean_posterior: &[f64], gd: &GeodesicMatrix) -> Vec<f64> {
    let n = gd.len();
    assert_eq!(mean_posterior.len(), n, "one posterior per superpixel");
    let w = refine_weights(gd);
    (0..n)
        .map(|q| {
            w[q * n..(q + 1) * n]
                .iter()
                .zip(mean_posterior)
                .map(|(a, b)| a * b)
                .sum()
        })
        .collect()
}

/// Paints the refined superpixel values back onto pixels and normalizes.
pub fn refine_map(g: &SuperpixelGraph, gd: &GeodesicMatrix) -> Result<SaliencyMap> {
    if gd.len() != g.len() {
        return Err(Error::DimensionMismatch {
            expected: g.len(),
            actual: gd.len(),
        });
    }
    let values = refine_superpixels(&g.mean_posterior, gd);
    let sp = &g.superpixels;
    let painted = sp.labels().iter().map(|&l| values[l]).collect();
    normalize_map(&SaliencyMap::new(sp.width(), sp.height(), painted)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane(w: usize, h: usize, f: impl Fn(usize, usize) -> f64) -> Plane {
        Plane {
            width: w,
            height: h,
            data: (0..w * h).map(|i| f(i % w, i / w)).collect(),
        }
    }

    #[test]
    fn flat_region_averages_everything() {
        let n = 5;
        let gd = GeodesicMatrix::new(n, vec![0.0; n * n], 1.0);
        let sbar = [0.1, 0.9, 0.4, 0.0, 0.6];
        let mean = sbar.iter().sum::<f64>() / n as f64;
        for v in refine_superpixels(&sbar, &gd) {
            assert!((v - mean).abs() < 1e-15);
        }
    }

    #[test]
    fn strong_edge_blocks_propagation() {
        let sigma = 1.0;
        let w = (-(3.0f64 * sigma).powi(2) / (2.0 * sigma * sigma)).exp();
        assert!(w <= (-4.5f64).exp() + 1e-15 && w < 0.0112);
        // Two superpixels three sigmas apart.
        let gd = GeodesicMatrix::new(2, vec![0.0, 3.0, 3.0, 0.0], sigma);
        let s = refine_superpixels(&[1.0, 0.0], &gd);
        assert!(s[0] > 0.98 && s[1] < 0.02);
    }

    #[test]
    fn three_chain_value() {
        let d = [0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0, 1.0, 0.0];
        let gd = GeodesicMatrix::new(3, d.to_vec(), 1.0);
        let s = refine_superpixels(&[1.0, 0.0, 0.0], &gd);
        let expected = 1.0 / (1.0 + (-0.5f64).exp() + (-2.0f64).exp());
        assert!((s[0] - expected).abs() < 1e-15);
        assert!((s[0] - 0.5741).abs() < 1e-4);
    }

    #[test]
    fn graph_statistics() {
        let (w, h) = (4, 2);
        let sp = Superpixels::new(w, h, vec![0, 0, 1, 1, 0, 0, 1, 1]).unwrap();
        let l = plane(w, h, |x, _| if x < 2 { 10.0 } else { 13.0 });
        let a = plane(w, h, |x, _| if x < 2 { 0.0 } else { 4.0 });
        let b = plane(w, h, |_, _| 0.0);
        let post = SaliencyMap::new(w, h, vec![0.0, 0.2, 1.0, 1.0, 0.2, 0.2, 0.5, 0.5]).unwrap();
        let g = SuperpixelGraph::build(sp, [&l, &a, &b], &post).unwrap();
        assert_eq!(g.sizes(), &[4, 4]);
        assert_eq!(g.mean_lab(), &[[10.0, 0.0, 0.0], [13.0, 4.0, 0.0]]);
        assert!((g.mean_posterior()[0] - 0.15).abs() < 1e-15);
        assert!((g.mean_posterior()[1] - 0.75).abs() < 1e-15);
        assert_eq!(
            g.edges(),
            &[Edge {
                a: 0,
                b: 1,
                weight: 5.0
            }]
        );
        let gd = geodesic_distances(&g);
        assert_eq!(gd.get(0, 1), 5.0);
        assert_eq!(gd.sigma(), SIGMA_FLOOR);
    }

    #[test]
    fn relabeling_does_not_change_the_map() {
        let (w, h) = (6, 4);
        let labels: Vec<usize> = (0..w * h).map(|i| (i % w) / 2 + 3 * ((i / w) / 2)).collect();
        let l = plane(w, h, |x, y| (x * 10 + y * 3) as f64);
        let a = plane(w, h, |x, _| x as f64);
        let b = plane(w, h, |_, y| -(y as f64));
        let post = SaliencyMap::new(w, h, (0..w * h).map(|i| (i as f64 * 0.37).sin().abs()).collect()).unwrap();

        let run = |labels: Vec<usize>| {
            let g = SuperpixelGraph::build(Superpixels::new(w, h, labels).unwrap(), [&l, &a, &b], &post).unwrap();
            refine_map(&g, &geodesic_distances(&g)).unwrap()
        };
        let perm = [4, 2, 5, 0, 3, 1];
        let base = run(labels.clone());
        let permuted = run(labels.iter().map(|&k| perm[k]).collect());
        for (x, y) in base.values().iter().zip(permuted.values()) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
