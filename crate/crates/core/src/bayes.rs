//! Bayesian enhancement of the coarse map.
//!
//! The coarse map is split into foreground and background at its mean. Each
//! region gets one histogram per Lab channel, the likelihood of a pixel is the
//! product of its three bin frequencies, and the coarse map acts as the prior
//! in Bayes' rule.

use crate::error::{Error, Result};
use crate::imagecore::{BinaryMask, Plane, SaliencyMap};

/// Foreground mask `S^cm >= mean(S^cm)`, falling back to a 0.5 threshold when
/// the split would leave one side empty.
pub fn extract_foreground_mask(scm: &SaliencyMap) -> BinaryMask {
    let split = |t: f64| -> Vec<bool> { scm.values().iter().map(|&v| v >= t).collect() };
    let mut data = split(scm.mean());
    let fg = data.iter().filter(|&&b| b).count();
    if fg == 0 || fg == data.len() {
        data = split(0.5);
    }
    BinaryMask::new(scm.width(), scm.height(), data).expect("mask matches map size")
}

/// Per-channel histograms of the foreground (`R¹`) and background (`R⁰`)
/// regions over shared, uniform bins.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionHistograms {
    bins: usize,
    ranges: [(f64, f64); 3],
    foreground: [Vec<usize>; 3],
    background: [Vec<usize>; 3],
    n_foreground: usize,
    n_background: usize,
}

impl RegionHistograms {
    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn foreground(&self, channel: usize) -> &[usize] {
        &self.foreground[channel]
    }

    pub fn background(&self, channel: usize) -> &[usize] {
        &self.background[channel]
    }

    pub fn n_foreground(&self) -> usize {
        self.n_foreground
    }

    pub fn n_background(&self) -> usize {
        self.n_background
    }

    /// Bin of `value` on `channel`.
    pub fn bin(&self, channel: usize, value: f64) -> usize {
        let (lo, hi) = self.ranges[channel];
        if hi <= lo {
            return 0;
        }
        let t = (value - lo) / (hi - lo);
        ((t * self.bins as f64).floor().max(0.0) as usize).min(self.bins - 1)
    }
}

/// Builds the region histograms. Bin edges span each channel's observed range
/// over the whole image.
pub fn build_histograms(lab: [&Plane; 3], mask: &BinaryMask, bins: usize) -> Result<RegionHistograms> {
    if bins == 0 {
        return Err(Error::Config("histogram needs at least one bin".into()));
    }
    let n = mask.len();
    for plane in lab {
        if plane.width != mask.width() || plane.height != mask.height() {
            return Err(Error::SizeMismatch(
                plane.width,
                plane.height,
                mask.width(),
                mask.height(),
            ));
        }
    }
    let n_foreground = mask.count();
    let n_background = n - n_foreground;
    if n_foreground == 0 {
        return Err(Error::EmptyRegion("foreground"));
    }
    if n_background == 0 {
        return Err(Error::EmptyRegion("background"));
    }

    let ranges = lab.map(|p| {
        p.data.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        })
    });
    let mut h = RegionHistograms {
        bins,
        ranges,
        foreground: std::array::from_fn(|_| vec![0; bins]),
        background: std::array::from_fn(|_| vec![0; bins]),
        n_foreground,
        n_background,
    };
    for (c, plane) in lab.iter().enumerate() {
        for (&v, &fg) in plane.data.iter().zip(mask.data()) {
            let b = h.bin(c, v);
            if fg {
                h.foreground[c][b] += 1;
            } else {
                h.background[c][b] += 1;
            }
        }
    }
    Ok(h)
}

/// `(p(g|R¹), p(g|R⁰))` for the Lab color `g`, assuming independent channels.
pub fn likelihood(h: &RegionHistograms, g: [f64; 3]) -> (f64, f64) {
    let mut fg = 1.0;
    let mut bg = 1.0;
    for (c, &v) in g.iter().enumerate() {
        let b = h.bin(c, v);
        fg *= h.foreground[c][b] as f64 / h.n_foreground as f64;
        bg *= h.background[c][b] as f64 / h.n_background as f64;
    }
    (fg, bg)
}

/// Bayes' rule for one pixel. Equal likelihoods or a zero denominator return
/// the prior unchanged.
#[inline]
pub fn posterior(prior: f64, p_fg: f64, p_bg: f64) -> f64 {
    if p_fg == p_bg {
        return prior;
    }
    let num = p_fg * prior;
    let den = num + p_bg * (1.0 - prior);
    if den > 0.0 {
        (num / den).clamp(0.0, 1.0)
    } else {
        prior
    }
}

/// Posterior probability map `S_p`.
pub fn posterior_map(scm: &SaliencyMap, h: &RegionHistograms, lab: [&Plane; 3]) -> Result<SaliencyMap> {
    for plane in lab {
        scm.same_size(plane.width, plane.height)?;
    }
    let values = scm
        .values()
        .iter()
        .enumerate()
        .map(|(i, &prior)| {
            let (p1, p0) = likelihood(h, [lab[0].data[i], lab[1].data[i], lab[2].data[i]]);
            posterior(prior, p1, p0)
        })
        .collect();
    SaliencyMap::new(scm.width(), scm.height(), values)
}

/// Mask extraction, histograms and posterior in one call.
pub fn enhance(scm: &SaliencyMap, lab: [&Plane; 3], bins: usize) -> Result<SaliencyMap> {
    let mask = extract_foreground_mask(scm);
    match build_histograms(lab, &mask, bins) {
        Ok(h) => posterior_map(scm, &h, lab),
        // A constant prior has no split at any threshold; nothing to enhance.
        Err(Error::EmptyRegion(_)) => Ok(scm.clone()),
        Err(e) => Err(e),
    }
}
