//! Saliency evaluation: PR and F-measure curves over 256 thresholds,
//! adaptive-threshold precision/recall/F, MAE and ROC AUC.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imagecore::{BinaryMask, SaliencyMap};

/// `β²` of the F-measure.
pub const BETA_SQUARED: f64 = 0.3;

/// Number of integer thresholds `0..=255`.
pub const THRESHOLDS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrPoint {
    pub precision: f64,
    pub recall: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveMetrics {
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// Indexed by threshold `t` in `0..=255`.
    pub pr_curve: Vec<PrPoint>,
    pub f_curve: Vec<f64>,
    pub adaptive: AdaptiveMetrics,
    pub mae: f64,
    pub auc: f64,
}

/// `(1+β²) p r / (β² p + r)`, defined as 0 when `p = r = 0`.
pub fn f_measure(precision: f64, recall: f64) -> f64 {
    let den = BETA_SQUARED * precision + recall;
    if den <= 0.0 {
        0.0
    } else {
        (1.0 + BETA_SQUARED) * precision * recall / den
    }
}

fn check(s: &SaliencyMap, gt: &BinaryMask) -> Result<()> {
    s.same_size(gt.width(), gt.height())
}

/// 8-bit level of a saliency value.
#[inline]
fn level(v: f64) -> usize {
    (v * 255.0).round().clamp(0.0, 255.0) as usize
}

/// Per-level histograms of positive and negative pixels.
fn level_histograms(s: &SaliencyMap, gt: &BinaryMask) -> ([usize; THRESHOLDS], [usize; THRESHOLDS]) {
    let mut pos = [0usize; THRESHOLDS];
    let mut neg = [0usize; THRESHOLDS];
    for (&v, &g) in s.values().iter().zip(gt.data()) {
        if g {
            pos[level(v)] += 1;
        } else {
            neg[level(v)] += 1;
        }
    }
    (pos, neg)
}

/// `(TP(t), FP(t))` for every threshold, predicting positive at `level >= t`.
fn cumulative_counts(s: &SaliencyMap, gt: &BinaryMask) -> Vec<(usize, usize)> {
    let (pos, neg) = level_histograms(s, gt);
    let mut out = vec![(0, 0); THRESHOLDS];
    let (mut tp, mut fp) = (0, 0);
    for t in (0..THRESHOLDS).rev() {
        tp += pos[t];
        fp += neg[t];
        out[t] = (tp, fp);
    }
    out
}

fn precision_recall(tp: usize, fp: usize, positives: usize) -> PrPoint {
    let precision = if tp + fp == 0 {
        1.0
    } else {
        tp as f64 / (tp + fp) as f64
    };
    PrPoint {
        precision,
        recall: tp as f64 / positives as f64,
    }
}

/// Precision and recall at every integer threshold of the 8-bit map.
/// Precision is 1 when nothing is predicted positive.
pub fn pr_curve(s: &SaliencyMap, gt: &BinaryMask) -> Result<Vec<PrPoint>> {
    check(s, gt)?;
    let positives = gt.count();
    if positives == 0 {
        return Err(Error::EmptyGroundTruth);
    }
    Ok(cumulative_counts(s, gt)
        .into_iter()
        .map(|(tp, fp)| precision_recall(tp, fp, positives))
        .collect())
}

/// Precision, recall and F at `min(2 * mean(s), 1)`.
pub fn adaptive_threshold_metrics(s: &SaliencyMap, gt: &BinaryMask) -> Result<AdaptiveMetrics> {
    check(s, gt)?;
    let positives = gt.count();
    if positives == 0 {
        return Err(Error::EmptyGroundTruth);
    }
    let threshold = (2.0 * s.mean()).min(1.0);
    let (mut tp, mut fp) = (0, 0);
    for (&v, &g) in s.values().iter().zip(gt.data()) {
        if v >= threshold {
            if g {
                tp += 1;
            } else {
                fp += 1;
            }
        }
    }
    let PrPoint { precision, recall } = precision_recall(tp, fp, positives);
    Ok(AdaptiveMetrics {
        threshold,
        precision,
        recall,
        f_measure: f_measure(precision, recall),
    })
}

/// Mean absolute error against the binary ground truth.
pub fn mae(s: &SaliencyMap, gt: &BinaryMask) -> Result<f64> {
    check(s, gt)?;
    if s.is_empty() {
        return Ok(0.0);
    }
    let total: f64 = s
        .values()
        .iter()
        .zip(gt.data())
        .map(|(&v, &g)| (v - if g { 1.0 } else { 0.0 }).abs())
        .sum();
    Ok(total / s.len() as f64)
}

/// Area under the ROC curve of the 256-threshold sweep, trapezoidal rule.
pub fn auc(s: &SaliencyMap, gt: &BinaryMask) -> Result<f64> {
    check(s, gt)?;
    let positives = gt.count();
    let negatives = gt.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::SingleClassGroundTruth);
    }
    let counts = cumulative_counts(s, gt);
    // Walk thresholds from strict to permissive so FPR grows, starting at (0, 0).
    let (mut prev_tpr, mut prev_fpr) = (0.0, 0.0);
    let mut area = 0.0;
    for &(tp, fp) in counts.iter().rev() {
        let tpr = tp as f64 / positives as f64;
        let fpr = fp as f64 / negatives as f64;
        area += (fpr - prev_fpr) * (tpr + prev_tpr) * 0.5;
        (prev_tpr, prev_fpr) = (tpr, fpr);
    }
    Ok(area.clamp(0.0, 1.0))
}

/// Every metric for one image. The ground truth must contain both classes.
pub fn evaluate(s: &SaliencyMap, gt: &BinaryMask) -> Result<EvalReport> {
    let pr_curve = pr_curve(s, gt)?;
    let f_curve = pr_curve.iter().map(|p| f_measure(p.precision, p.recall)).collect();
    Ok(EvalReport {
        pr_curve,
        f_curve,
        adaptive: adaptive_threshold_metrics(s, gt)?,
        mae: mae(s, gt)?,
        auc: auc(s, gt)?,
    })
}

/// Field-wise arithmetic mean of per-image reports.
pub fn aggregate(reports: &[EvalReport]) -> Result<EvalReport> {
    let first = reports.first().ok_or(Error::EmptyAggregate)?;
    let n = reports.len() as f64;
    let mean = |f: &dyn Fn(&EvalReport) -> f64| reports.iter().map(f).sum::<f64>() / n;
    let len = first.pr_curve.len();
    let pr_curve = (0..len)
        .map(|t| PrPoint {
            precision: mean(&|r| r.pr_curve[t].precision),
            recall: mean(&|r| r.pr_curve[t].recall),
        })
        .collect();
    let f_curve = (0..first.f_curve.len()).map(|t| mean(&|r| r.f_curve[t])).collect();
    Ok(EvalReport {
        pr_curve,
        f_curve,
        adaptive: AdaptiveMetrics {
            threshold: mean(&|r| r.adaptive.threshold),
            precision: mean(&|r| r.adaptive.precision),
            recall: mean(&|r| r.adaptive.recall),
            f_measure: mean(&|r| r.adaptive.f_measure),
        },
        mae: mean(&|r| r.mae),
        auc: mean(&|r| r.auc),
    })
}
