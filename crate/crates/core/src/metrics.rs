//! AUC-Judd, shuffled AUC, NSS, SIM and CC.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::Pixel;
use crate::error::{Error, Result};
use crate::map::{normalize_sum, resize, SaliencyMap};
use crate::selection::histogram_intersection;

fn in_bounds<'a>(pred: &'a SaliencyMap, pts: &'a [Pixel]) -> impl Iterator<Item = Pixel> + 'a {
    pts.iter()
        .copied()
        .filter(|p| p.x < pred.width() && p.y < pred.height())
}

/// ROC area with thresholds at the distinct positive scores.
///
/// The curve runs from (0, 0) through one point per threshold to (1, 1) and
/// is integrated with the trapezoid rule.
fn roc_area(mut positives: Vec<f64>, mut negatives: Vec<f64>) -> f64 {
    let desc = |a: &f64, b: &f64| b.partial_cmp(a).expect("finite scores");
    positives.sort_by(desc);
    negatives.sort_by(desc);
    let (np, nn) = (positives.len() as f64, negatives.len() as f64);

    let mut area = 0.0;
    let (mut prev_fpr, mut prev_tpr) = (0.0, 0.0);
    let (mut ip, mut ineg) = (0usize, 0usize);
    let mut thresholds = positives.clone();
    thresholds.dedup();
    for thr in thresholds {
        while ip < positives.len() && positives[ip] >= thr {
            ip += 1;
        }
        while ineg < negatives.len() && negatives[ineg] >= thr {
            ineg += 1;
        }
        let (fpr, tpr) = (ineg as f64 / nn, ip as f64 / np);
        area += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0;
        (prev_fpr, prev_tpr) = (fpr, tpr);
    }
    area += (1.0 - prev_fpr) * (1.0 + prev_tpr) / 2.0;
    area
}

/// AUC-Judd: fixated pixels against every non-fixated pixel.
pub fn auc(pred: &SaliencyMap, fixations: &[Pixel]) -> Result<f64> {
    let fixated: HashSet<Pixel> = in_bounds(pred, fixations).collect();
    if fixated.is_empty() {
        return Err(Error::NoFixations);
    }
    let positives: Vec<f64> = in_bounds(pred, fixations)
        .map(|p| pred.get(p.x, p.y))
        .collect();
    let w = pred.width();
    let negatives: Vec<f64> = pred
        .values()
        .iter()
        .enumerate()
        .filter(|(i, _)| !fixated.contains(&Pixel::new(i % w, i / w)))
        .map(|(_, &v)| v)
        .collect();
    if negatives.is_empty() {
        return Err(Error::NoNegatives);
    }
    Ok(roc_area(positives, negatives))
}

/// Shuffled AUC: fixated pixels against fixations drawn from elsewhere.
pub fn sauc(pred: &SaliencyMap, fixations: &[Pixel], shuffle_pool: &[Pixel]) -> Result<f64> {
    let positives: Vec<f64> = in_bounds(pred, fixations)
        .map(|p| pred.get(p.x, p.y))
        .collect();
    if positives.is_empty() {
        return Err(Error::NoFixations);
    }
    let negatives: Vec<f64> = in_bounds(pred, shuffle_pool)
        .map(|p| pred.get(p.x, p.y))
        .collect();
    if negatives.is_empty() {
        return Err(Error::EmptyPool);
    }
    Ok(roc_area(positives, negatives))
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Mean standardized prediction at fixated pixels (population std).
///
/// Constant maps score zero.
pub fn nss(pred: &SaliencyMap, fixations: &[Pixel]) -> Result<f64> {
    let at: Vec<f64> = in_bounds(pred, fixations)
        .map(|p| pred.get(p.x, p.y))
        .collect();
    if at.is_empty() {
        return Err(Error::NoFixations);
    }
    // exact test: a rounded mean leaves a spurious tiny std on flat maps
    if pred.max() == pred.min() {
        return Ok(0.0);
    }
    let (mean, std) = mean_std(pred.values());
    Ok(at.iter().map(|v| (v - mean) / std).sum::<f64>() / at.len() as f64)
}

fn gt_at_pred_resolution(pred: &SaliencyMap, gt: &SaliencyMap) -> Result<SaliencyMap> {
    resize(gt, pred.width(), pred.height())
}

/// Histogram intersection of the two maps as distributions.
pub fn sim(pred: &SaliencyMap, gt: &SaliencyMap) -> Result<f64> {
    let gt = gt_at_pred_resolution(pred, gt)?;
    let (p, q) = (normalize_sum(pred)?, normalize_sum(&gt)?);
    Ok(histogram_intersection(p.values(), q.values()).min(1.0))
}

/// Pearson correlation over pixels.
pub fn cc(pred: &SaliencyMap, gt: &SaliencyMap) -> Result<f64> {
    let gt = gt_at_pred_resolution(pred, gt)?;
    if pred.max() == pred.min() || gt.max() == gt.min() {
        return Err(Error::ZeroVariance);
    }
    let (ma, sa) = mean_std(pred.values());
    let (mb, sb) = mean_std(gt.values());
    let n = pred.len() as f64;
    let cov = pred
        .values()
        .iter()
        .zip(gt.values())
        .map(|(a, b)| (a - ma) * (b - mb))
        .sum::<f64>()
        / n;
    Ok((cov / (sa * sb)).clamp(-1.0, 1.0))
}

/// Scores for one frame. Fields are `None` when the metric is undefined
/// there (no fixations, empty pool, or a flat ground truth).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameMetrics {
    pub frame: usize,
    pub auc: Option<f64>,
    pub sauc: Option<f64>,
    pub nss: Option<f64>,
    pub sim: Option<f64>,
    pub cc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub auc: Option<f64>,
    pub sauc: Option<f64>,
    pub nss: Option<f64>,
    pub sim: Option<f64>,
    pub cc: Option<f64>,
    pub frames: Vec<FrameMetrics>,
}

fn mean_of(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let v: Vec<f64> = values.flatten().collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

impl MetricReport {
    pub fn from_frames(frames: Vec<FrameMetrics>) -> Self {
        Self {
            auc: mean_of(frames.iter().map(|f| f.auc)),
            sauc: mean_of(frames.iter().map(|f| f.sauc)),
            nss: mean_of(frames.iter().map(|f| f.nss)),
            sim: mean_of(frames.iter().map(|f| f.sim)),
            cc: mean_of(frames.iter().map(|f| f.cc)),
            frames,
        }
    }
}

/// Turns a recoverable "undefined here" error into `None`.
fn optional(r: Result<f64>) -> Result<Option<f64>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(
            Error::NoFixations
            | Error::NoNegatives
            | Error::EmptyPool
            | Error::AllZeroMap
            | Error::ZeroVariance,
        ) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Scores every frame and averages.
///
/// Frames without fixations get no AUC, sAUC or NSS; SIM and CC are skipped
/// only where the ground truth is flat. The pool for frame `k` is `pool`
/// minus frame `k`'s fixated pixels.
pub fn evaluate_sequence(
    preds: &[SaliencyMap],
    gts: &[SaliencyMap],
    fixations: &[Vec<Pixel>],
    pool: &[Pixel],
) -> Result<MetricReport> {
    if preds.is_empty() {
        return Err(Error::EmptySequence);
    }
    if gts.len() != preds.len() || fixations.len() != preds.len() {
        return Err(Error::InvalidArgument(format!(
            "misaligned sequence: {} predictions, {} ground truths, {} fixation lists",
            preds.len(),
            gts.len(),
            fixations.len()
        )));
    }
    let frames = (0..preds.len())
        .into_par_iter()
        .map(|k| {
            let (pred, gt, fix) = (&preds[k], &gts[k], &fixations[k]);
            let fixated: HashSet<Pixel> = fix.iter().copied().collect();
            let frame_pool: Vec<Pixel> = pool
                .iter()
                .copied()
                .filter(|p| !fixated.contains(p))
                .collect();
            Ok(FrameMetrics {
                frame: k,
                auc: optional(auc(pred, fix))?,
                sauc: optional(sauc(pred, fix, &frame_pool))?,
                nss: optional(nss(pred, fix))?,
                sim: optional(sim(pred, gt))?,
                cc: optional(cc(pred, gt))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MetricReport::from_frames(frames))
}
